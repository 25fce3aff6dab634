//! Sweep axes: `path=start:stop:count` or `path=v1,v2,…` over numeric
//! fields of the config's JSON tree.

use serde_json::{Number, Value};

use crate::error::{Error, Result};

/// One sweep axis: a field path and the values it takes.
#[derive(Debug, Clone, PartialEq)]
pub struct Axis {
    pub path: String,
    pub values: Vec<f64>,
}

impl Axis {
    /// Parses `path=start:stop:count` (evenly spaced, endpoints included) or
    /// `path=v1,v2,…`.
    pub fn parse(spec: &str) -> Result<Axis> {
        let (path, range) = spec.split_once('=').ok_or_else(|| {
            Error::Config(format!("axis {spec:?} must look like path=start:stop:count or path=v1,v2"))
        })?;
        let path = path.trim();
        if path.is_empty() {
            return Err(Error::Config(format!("axis {spec:?} has an empty path")));
        }
        let num = |s: &str| -> Result<f64> {
            s.trim()
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| Error::Config(format!("axis {spec:?}: {s:?} is not a finite number")))
        };
        let values = if range.contains(':') {
            let parts: Vec<&str> = range.split(':').collect();
            if parts.len() != 3 {
                return Err(Error::Config(format!("axis {spec:?}: a range needs start:stop:count")));
            }
            let (start, stop) = (num(parts[0])?, num(parts[1])?);
            let count: usize = parts[2]
                .trim()
                .parse()
                .ok()
                .filter(|&c| c >= 1)
                .ok_or_else(|| Error::Config(format!("axis {spec:?}: count must be a positive integer")))?;
            if count == 1 {
                vec![start]
            } else {
                (0..count).map(|i| start + (stop - start) * i as f64 / (count - 1) as f64).collect()
            }
        } else {
            range.split(',').map(num).collect::<Result<_>>()?
        };
        Ok(Axis { path: path.to_string(), values })
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Step {
    Key(String),
    Index(usize),
}

fn steps(path: &str) -> Option<Vec<Step>> {
    let mut out = Vec::new();
    for seg in path.split('.') {
        let (name, mut rest) = match seg.find('[') {
            Some(i) => (&seg[..i], &seg[i..]),
            None => (seg, ""),
        };
        if name.is_empty() {
            return None;
        }
        out.push(Step::Key(name.to_string()));
        while !rest.is_empty() {
            let close = rest.find(']')?;
            if !rest.starts_with('[') {
                return None;
            }
            out.push(Step::Index(rest[1..close].parse().ok()?));
            rest = &rest[close + 1..];
        }
    }
    Some(out)
}

/// Every numeric leaf of `v`, as a path accepted by [`set_field`].
pub fn numeric_paths(v: &Value) -> Vec<String> {
    fn walk(v: &Value, prefix: String, out: &mut Vec<String>) {
        match v {
            Value::Number(_) => out.push(prefix),
            Value::Array(items) => {
                for (i, item) in items.iter().enumerate() {
                    walk(item, format!("{prefix}[{i}]"), out);
                }
            }
            Value::Object(map) => {
                for (k, item) in map {
                    let p = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                    walk(item, p, out);
                }
            }
            _ => {}
        }
    }
    let mut out = Vec::new();
    walk(v, String::new(), &mut out);
    out
}

/// Sets the numeric field at `path` to `value`. Integer fields only accept
/// integral values. Setting an entry of a `probs` array rescales the other
/// entries so the array still sums to one.
pub fn set_field(root: &mut Value, path: &str, value: f64) -> Result<()> {
    let unknown = |root: &Value| {
        Error::Config(format!("unknown numeric field {path:?}; valid paths: {}", numeric_paths(root).join(", ")))
    };
    let Some(steps) = steps(path) else {
        return Err(unknown(root));
    };
    let (last, parents) = steps.split_last().expect("non-empty path");
    let mut node = &mut *root;
    for step in parents {
        let next = match step {
            Step::Key(k) => node.get_mut(k.as_str()),
            Step::Index(i) => node.get_mut(*i),
        };
        node = match next {
            Some(n) => n,
            None => return Err(unknown(root)),
        };
    }
    let in_probs = matches!(parents.last(), Some(Step::Key(k)) if k == "probs");
    let leaf = match last {
        Step::Key(k) => node.get(k.as_str()),
        Step::Index(i) => node.get(*i),
    };
    let Some(Value::Number(old)) = leaf else {
        return Err(unknown(root));
    };
    let new = if old.is_f64() {
        Number::from_f64(value)
    } else if value.fract() == 0.0 && value >= 0.0 && value <= u64::MAX as f64 {
        Some(Number::from(value as u64))
    } else {
        return Err(Error::Config(format!("field {path:?} takes non-negative integers, got {value}")));
    };
    let new = Value::Number(new.ok_or_else(|| Error::Config(format!("{value} is not a JSON number")))?);
    match last {
        Step::Key(k) => node[k.as_str()] = new,
        Step::Index(i) => {
            node[*i] = new;
            if in_probs {
                rescale_others(node, *i, value)?;
            }
        }
    }
    Ok(())
}

fn rescale_others(probs: &mut Value, fixed: usize, value: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&value) {
        return Err(Error::Config(format!("a probability must lie in [0, 1], got {value}")));
    }
    let items = probs.as_array_mut().expect("indexed node is an array");
    let n = items.len();
    if n == 1 {
        return Ok(());
    }
    let others: f64 = items.iter().enumerate().filter(|&(j, _)| j != fixed).filter_map(|(_, v)| v.as_f64()).sum();
    for (j, item) in items.iter_mut().enumerate() {
        if j == fixed {
            continue;
        }
        let old = item.as_f64().unwrap_or(0.0);
        let scaled = if others > 0.0 { old * (1.0 - value) / others } else { (1.0 - value) / (n - 1) as f64 };
        *item = Value::Number(Number::from_f64(scaled).expect("finite probability"));
    }
    Ok(())
}
