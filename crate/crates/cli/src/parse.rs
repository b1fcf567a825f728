//! Parsers for the `family:key=value,...` law and weight specs, t grids and
//! `--config` files.

use std::collections::BTreeMap;

use varentropy::coherent::DistortionFunction;
use varentropy::distributions::{Distribution, Family};
use varentropy::measures::Weight;

fn key_values(body: &str) -> Result<BTreeMap<String, f64>, String> {
    let mut out = BTreeMap::new();
    for part in body.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let (k, v) = part
            .split_once('=')
            .ok_or_else(|| format!("expected key=value, got '{part}'"))?;
        let v: f64 = v
            .trim()
            .parse()
            .map_err(|_| format!("parameter {k} is not a number: '{v}'"))?;
        if out.insert(k.trim().to_string(), v).is_some() {
            return Err(format!("parameter {k} given twice"));
        }
    }
    Ok(out)
}

fn take(kv: &mut BTreeMap<String, f64>, keys: &[&str], default: Option<f64>) -> Result<f64, String> {
    for k in keys {
        if let Some(v) = kv.remove(*k) {
            return Ok(v);
        }
    }
    default.ok_or_else(|| format!("missing parameter {}", keys[0]))
}

/// `exp:lambda=0.7`, `uniform:a=0,b=1`, `power:beta=0.2`, ...
pub fn distribution(spec: &str) -> Result<Distribution, String> {
    let (name, body) = spec.split_once(':').unwrap_or((spec, ""));
    let mut kv = key_values(body)?;
    let family = match name.trim() {
        "exp" | "exponential" => Family::Exponential {
            lambda: take(&mut kv, &["lambda", "rate"], None)?,
        },
        "uniform" => Family::Uniform {
            a: take(&mut kv, &["a"], Some(0.0))?,
            b: take(&mut kv, &["b"], Some(1.0))?,
        },
        "pareto" => Family::ParetoI {
            alpha: take(&mut kv, &["alpha"], None)?,
        },
        "weibull-sqrt" => Family::SqrtWeibull {
            lambda: take(&mut kv, &["lambda"], None)?,
        },
        "power" => Family::Power {
            beta: take(&mut kv, &["beta"], None)?,
            scale: take(&mut kv, &["scale"], Some(1.0))?,
        },
        "lomax" => Family::Lomax {
            delta: take(&mut kv, &["delta"], None)?,
            gamma: take(&mut kv, &["gamma"], None)?,
        },
        "shifted-exp" => Family::ShiftedExponential {
            beta: take(&mut kv, &["beta"], None)?,
        },
        "gumbel2" => Family::GumbelII {
            alpha: take(&mut kv, &["alpha"], None)?,
            lambda: take(&mut kv, &["lambda"], None)?,
        },
        "weibull" => Family::Weibull {
            shape: take(&mut kv, &["shape"], None)?,
            scale: take(&mut kv, &["scale"], Some(1.0))?,
        },
        other => return Err(format!("unknown family '{other}'")),
    };
    if let Some(k) = kv.keys().next() {
        return Err(format!("unknown parameter '{k}' for {name}"));
    }
    Distribution::new(family).map_err(|e| e.to_string())
}

/// `y`, `1`, `y^2`, `affine:a=2,b=1`, `cubic:alpha=2,beta=1`.
pub fn weight(spec: &str) -> Result<Weight, String> {
    let (name, body) = spec.split_once(':').unwrap_or((spec, ""));
    let mut kv = key_values(body)?;
    let w = match name.trim() {
        "y" | "identity" => Weight::Identity,
        "1" | "unit" => Weight::Unit,
        "y^2" | "square" => Weight::Square,
        "affine" => Weight::Affine {
            a: take(&mut kv, &["a"], None)?,
            b: take(&mut kv, &["b"], None)?,
        },
        "cubic" => Weight::CubicAffine {
            alpha: take(&mut kv, &["alpha"], None)?,
            beta: take(&mut kv, &["beta"], None)?,
        },
        other => return Err(format!("unknown weight '{other}'")),
    };
    if let Some(k) = kv.keys().next() {
        return Err(format!("unknown parameter '{k}' for weight {name}"));
    }
    Ok(w)
}

/// `a:b:step` (inclusive), a comma list, or one value.
pub fn grid(spec: &str) -> Result<Vec<f64>, String> {
    let num = |s: &str| -> Result<f64, String> {
        let v: f64 = s.trim().parse().map_err(|_| format!("not a number: '{s}'"))?;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(format!("not finite: '{s}'"))
        }
    };
    let parts: Vec<&str> = spec.split(':').collect();
    let out = match parts.as_slice() {
        [a, b, step] => {
            let (a, b, step) = (num(a)?, num(b)?, num(step)?);
            if !(step > 0.0) {
                return Err(format!("grid step must be positive, got {step}"));
            }
            let count = ((b - a) / step + 1e-9).floor();
            if count < 0.0 {
                Vec::new()
            } else {
                (0..=count as usize).map(|i| a + i as f64 * step).map(round12).collect()
            }
        }
        [single] => single
            .split(',')
            .filter(|s| !s.trim().is_empty())
            .map(num)
            .collect::<Result<Vec<_>, _>>()?,
        _ => return Err(format!("malformed grid '{spec}'")),
    };
    if out.is_empty() {
        return Err(format!("grid '{spec}' is empty"));
    }
    Ok(out)
}

fn round12(x: f64) -> f64 {
    (x * 1e12).round() / 1e12
}

pub fn sizes(spec: &str) -> Result<Vec<usize>, String> {
    let out = spec
        .split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| s.trim().parse::<usize>().map_err(|_| format!("not a sample size: '{s}'")))
        .collect::<Result<Vec<_>, _>>()?;
    if out.is_empty() || out.contains(&0) {
        return Err(format!("sample sizes '{spec}' must be positive"));
    }
    Ok(out)
}

/// `series`, `2-of-3`, `parallel`, `identity` or `poly:c1,c2,...`.
pub fn distortion(spec: &str) -> Result<DistortionFunction, String> {
    match spec.trim() {
        "series" => Ok(DistortionFunction::series()),
        "2-of-3" | "2of3" => Ok(DistortionFunction::two_of_three()),
        "parallel" => Ok(DistortionFunction::parallel()),
        "identity" => Ok(DistortionFunction::identity()),
        s => {
            let body = s
                .strip_prefix("poly:")
                .ok_or_else(|| format!("unknown system '{s}'"))?;
            let coeffs = body
                .split(',')
                .map(|c| c.trim().parse::<f64>().map_err(|_| format!("bad coefficient '{c}'")))
                .collect::<Result<Vec<_>, _>>()?;
            DistortionFunction::polynomial(&coeffs).map_err(|e| e.to_string())
        }
    }
}

/// Reads newline-delimited decimals; blank lines and `#` comments are skipped.
pub fn sample_text(text: &str) -> Result<Vec<f64>, String> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(|l| l.parse::<f64>().map_err(|_| format!("not a number: '{l}'")))
        .collect()
}

/// Splices `key=value` lines from the file named by `--config` into the
/// argument list as `--key value`, unless the flag is already present.
pub fn expand_config(args: Vec<String>) -> Result<Vec<String>, String> {
    let Some(pos) = args.iter().position(|a| a == "--config" || a.starts_with("--config=")) else {
        return Ok(args);
    };
    let (path, consumed) = match args[pos].split_once('=') {
        Some((_, p)) => (p.to_string(), 1),
        None => (
            args.get(pos + 1).cloned().ok_or("--config needs a path")?,
            2,
        ),
    };
    let text = std::fs::read_to_string(&path).map_err(|e| format!("cannot read config {path}: {e}"))?;
    let mut out: Vec<String> = args[..pos].to_vec();
    out.extend_from_slice(&args[pos + consumed..]);
    for line in text.lines().map(str::trim) {
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| format!("config line is not key=value: '{line}'"))?;
        let flag = format!("--{}", k.trim());
        let present = out.iter().any(|a| *a == flag || a.starts_with(&format!("{flag}=")));
        if !present {
            out.push(flag);
            out.push(v.trim().to_string());
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_laws() {
        assert_eq!(distribution("exp:lambda=0.7").unwrap(), Distribution::exponential(0.7).unwrap());
        assert_eq!(distribution("uniform").unwrap(), Distribution::uniform(0.0, 1.0).unwrap());
        assert!(distribution("gamma:k=1").is_err());
        assert!(distribution("exp:lambda=abc").is_err());
        assert!(distribution("exp:lambda=1,mu=2").is_err());
        assert!(distribution("exp:lambda=-1").is_err());
    }

    #[test]
    fn parses_grids() {
        assert_eq!(grid("0.1:0.3:0.1").unwrap(), vec![0.1, 0.2, 0.3]);
        assert_eq!(grid("0.5").unwrap(), vec![0.5]);
        assert_eq!(grid("1,2,3").unwrap(), vec![1.0, 2.0, 3.0]);
        assert!(grid("1:0:0.1").is_err());
        assert!(grid("").is_err());
    }

    #[test]
    fn config_does_not_override_flags() {
        let dir = std::env::temp_dir().join(format!("vcfg-{}", std::process::id()));
        std::fs::write(&dir, "dist=exp:lambda=2\n# c\nt=0.5\n").unwrap();
        let args: Vec<String> = ["bin", "measure", "--t", "1", "--config", dir.to_str().unwrap()]
            .iter()
            .map(|s| s.to_string())
            .collect();
        let out = expand_config(args).unwrap();
        assert_eq!(out, ["bin", "measure", "--t", "1", "--dist", "exp:lambda=2"]);
        std::fs::remove_file(dir).unwrap();
    }
}
