//! Value, list and grid specifications for the `v0`, `x` and `t` axes.

use std::fmt;
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Spacing {
    Lin,
    Log,
}

/// `0.5`, `0.1,1,2.5` or `min:max:count[:lin|log]`.
#[derive(Debug, Clone, PartialEq)]
pub enum AxisSpec {
    List(Vec<f64>),
    Grid {
        min: f64,
        max: f64,
        count: usize,
        spacing: Spacing,
    },
}

impl AxisSpec {
    pub fn single(v: f64) -> Self {
        AxisSpec::List(vec![v])
    }

    pub fn list(vs: &[f64]) -> Self {
        AxisSpec::List(vs.to_vec())
    }

    pub fn lin(min: f64, max: f64, count: usize) -> Self {
        AxisSpec::Grid {
            min,
            max,
            count,
            spacing: Spacing::Lin,
        }
    }

    pub fn log(min: f64, max: f64, count: usize) -> Self {
        AxisSpec::Grid {
            min,
            max,
            count,
            spacing: Spacing::Log,
        }
    }

    /// Sorted, deduplicated sample points. Grid endpoints are exact.
    pub fn values(&self) -> Vec<f64> {
        let mut out = match *self {
            AxisSpec::List(ref vs) => vs.clone(),
            AxisSpec::Grid {
                min,
                max,
                count,
                spacing,
            } => {
                let last = (count - 1) as f64;
                (0..count)
                    .map(|i| {
                        if i == 0 {
                            return min;
                        }
                        if i == count - 1 {
                            return max;
                        }
                        let f = i as f64 / last;
                        match spacing {
                            Spacing::Lin => min + (max - min) * f,
                            Spacing::Log => (min.ln() + (max.ln() - min.ln()) * f).exp(),
                        }
                    })
                    .collect()
            }
        };
        out.sort_by(f64::total_cmp);
        out.dedup();
        out
    }
}

impl FromStr for AxisSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let s = s.trim();
        let num = |tok: &str| -> Result<f64, String> {
            let v: f64 = tok
                .trim()
                .parse()
                .map_err(|_| format!("'{}' is not a number", tok.trim()))?;
            if v.is_finite() {
                Ok(v)
            } else {
                Err(format!("'{}' is not finite", tok.trim()))
            }
        };
        if s.contains(':') {
            let parts: Vec<&str> = s.split(':').collect();
            if parts.len() != 3 && parts.len() != 4 {
                return Err(format!("grid '{s}' must be min:max:count[:lin|log]"));
            }
            let min = num(parts[0])?;
            let max = num(parts[1])?;
            let count: usize = parts[2]
                .trim()
                .parse()
                .map_err(|_| format!("grid count '{}' is not an integer", parts[2]))?;
            if count < 2 {
                return Err(format!("grid '{s}' needs count >= 2"));
            }
            if !(max > min) {
                return Err(format!("grid '{s}' needs max > min"));
            }
            let spacing = match parts.get(3).map(|p| p.trim()) {
                None | Some("lin") => Spacing::Lin,
                Some("log") => Spacing::Log,
                Some(other) => return Err(format!("unknown spacing '{other}'")),
            };
            if spacing == Spacing::Log && !(min > 0.0) {
                return Err(format!("log grid '{s}' needs min > 0"));
            }
            Ok(AxisSpec::Grid {
                min,
                max,
                count,
                spacing,
            })
        } else {
            let vs = s.split(',').map(num).collect::<Result<Vec<_>, _>>()?;
            if vs.is_empty() {
                return Err("empty value list".into());
            }
            Ok(AxisSpec::List(vs))
        }
    }
}

impl fmt::Display for AxisSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AxisSpec::List(vs) => {
                let parts: Vec<String> = vs.iter().map(|v| format!("{v:?}")).collect();
                write!(f, "{}", parts.join(","))
            }
            AxisSpec::Grid {
                min,
                max,
                count,
                spacing,
            } => {
                let sp = match spacing {
                    Spacing::Lin => "lin",
                    Spacing::Log => "log",
                };
                write!(f, "{min:?}:{max:?}:{count}:{sp}")
            }
        }
    }
}
