use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context as _, Result};
use needlet_core::cutoff::{CutoffKind, CutoffSpec};
use needlet_core::kernels::{Family, TensorVariant};
use needlet_core::needlets::NeedletFamily;
use serde_json::Value;

use crate::Global;

/// Flags merged with the optional JSON config; explicit flags win.
pub struct Ctx {
    pub global: Global,
    pub cfg: Value,
}

/// Splits `name(a, b, ...)` into the name and its numeric arguments.
fn split_tag(tag: &str) -> Result<(String, Vec<f64>)> {
    let tag = tag.trim().to_ascii_lowercase();
    let Some(open) = tag.find('(') else {
        return Ok((tag, Vec::new()));
    };
    let close = tag.rfind(')').ok_or_else(|| anyhow!("unbalanced parentheses in '{tag}'"))?;
    let args = tag[open + 1..close]
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<f64>().map_err(|_| anyhow!("bad number '{s}' in '{tag}'")))
        .collect::<Result<Vec<_>>>()?;
    Ok((tag[..open].trim().to_string(), args))
}

fn as_dim(v: f64) -> Result<usize> {
    if v >= 1.0 && v.fract() == 0.0 {
        Ok(v as usize)
    } else {
        bail!("dimension must be a positive integer, got {v}")
    }
}

/// Kernel family tags: `trig`, `chebyshev`, `jacobi(a,b)`, `sphere(d)`, `ball(mu,d)`,
/// `simplex(k0,..,kd)`, `hermite(d)`, `laguerre(a1,..,ad)`, `legleg`, `chebcheb`, `chebleg`.
pub fn parse_family(tag: &str) -> Result<Family> {
    let (name, a) = split_tag(tag)?;
    let arg = |i: usize, default: f64| a.get(i).copied().unwrap_or(default);
    Ok(match name.as_str() {
        "trig" => Family::Trig,
        "chebyshev" => Family::Chebyshev,
        "jacobi" => Family::Jacobi { alpha: arg(0, 0.0), beta: arg(1, 0.0) },
        "sphere" => Family::Sphere { dim: as_dim(arg(0, 2.0))? },
        "ball" => Family::Ball { mu: arg(0, 0.5), dim: as_dim(arg(1, 2.0))? },
        "simplex" => Family::Simplex { kappa: if a.is_empty() { vec![0.0, 0.0] } else { a } },
        "hermite" => Family::Hermite { dim: as_dim(arg(0, 1.0))? },
        "laguerre" => Family::Laguerre { alpha: if a.is_empty() { vec![0.0] } else { a } },
        "legleg" => Family::TensorLegendre2d,
        "chebcheb" => Family::TensorChebyshev2d,
        "chebleg" => Family::MixedChebLegendre2d,
        _ => bail!("unknown family '{tag}'"),
    })
}

/// Needlet family tags: `jacobi(a,b)`, `hermite`, `laguerre(a)`.
pub fn parse_needlet_family(tag: &str) -> Result<NeedletFamily> {
    let (name, a) = split_tag(tag)?;
    let arg = |i: usize| a.get(i).copied().unwrap_or(0.0);
    Ok(match name.as_str() {
        "jacobi" => NeedletFamily::Jacobi { alpha: arg(0), beta: arg(1) },
        "hermite" => NeedletFamily::Hermite,
        "laguerre" => NeedletFamily::Laguerre { alpha: arg(0) },
        _ => bail!("unknown needlet family '{tag}'"),
    })
}

pub fn parse_variant(tag: &str) -> Result<TensorVariant> {
    match tag.trim().to_ascii_lowercase().as_str() {
        "legleg" => Ok(TensorVariant::LegLeg),
        "chebcheb" => Ok(TensorVariant::ChebCheb),
        "chebleg" => Ok(TensorVariant::ChebLeg),
        other => bail!("unknown tensor variant '{other}'"),
    }
}

pub fn parse_list<T: std::str::FromStr>(s: &str) -> Result<Vec<T>> {
    s.split(',')
        .map(str::trim)
        .filter(|p| !p.is_empty())
        .map(|p| p.parse::<T>().map_err(|_| anyhow!("bad list entry '{p}'")))
        .collect()
}

impl Ctx {
    pub fn new(global: Global) -> Result<Self> {
        let cfg = match &global.config {
            Some(p) => {
                let text = fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
                serde_json::from_str(&text).with_context(|| format!("parsing {}", p.display()))?
            }
            None => Value::Object(Default::default()),
        };
        if !cfg.is_object() {
            bail!("config must be a JSON object");
        }
        Ok(Self { global, cfg })
    }

    fn cfg_f64(&self, key: &str) -> Option<f64> {
        self.cfg.get(key).and_then(Value::as_f64)
    }

    pub fn cfg_usize(&self, key: &str) -> Option<usize> {
        self.cfg.get(key).and_then(Value::as_u64).map(|v| v as usize)
    }

    pub fn seed(&self) -> u64 {
        self.global.seed.or_else(|| self.cfg.get("seed").and_then(Value::as_u64)).unwrap_or(42)
    }

    pub fn n(&self, default: usize) -> usize {
        self.global.n.or_else(|| self.cfg_usize("n")).unwrap_or(default)
    }

    pub fn tolerance(&self, default: f64) -> f64 {
        self.global.tolerance.or_else(|| self.cfg_f64("tolerance")).unwrap_or(default)
    }

    pub fn epsilon(&self) -> f64 {
        self.global
            .epsilon
            .or_else(|| self.cfg_f64("epsilon"))
            .or_else(|| self.cfg.get("cutoff").and_then(|c| c.get("epsilon")).and_then(Value::as_f64))
            .unwrap_or(1.0)
    }

    /// Cutoff spec from `cfg.cutoff`, a top-level spec object, or the flags.
    pub fn cutoff_spec(&self, default_kind: CutoffKind) -> Result<CutoffSpec> {
        let parse = |v: &Value| -> Result<CutoffSpec> {
            let mut v = v.clone();
            if let Some(k) = v.get("kind").and_then(Value::as_str) {
                let kind = CutoffKind::parse(k).ok_or_else(|| anyhow!("unknown cutoff type '{k}'"))?;
                v["kind"] = serde_json::to_value(kind)?;
            }
            serde_json::from_value(v).context("invalid cutoff spec in config")
        };
        let mut spec = if let Some(c) = self.cfg.get("cutoff") {
            parse(c)?
        } else if self.cfg.get("kind").is_some() {
            parse(&self.cfg)?
        } else {
            CutoffSpec::new(default_kind, self.epsilon())
        };
        if let Some(k) = &self.global.kind {
            spec.kind = CutoffKind::parse(k).ok_or_else(|| anyhow!("unknown cutoff type '{k}'"))?;
        }
        if let Some(e) = self.global.epsilon {
            spec.epsilon = e;
        }
        Ok(spec)
    }

    pub fn family(&self, default: &str) -> Result<Family> {
        if let Some(f) = &self.global.family {
            return parse_family(f);
        }
        match self.cfg.get("family") {
            Some(Value::String(s)) => parse_family(s),
            Some(v) => serde_json::from_value(v.clone()).context("invalid family in config"),
            None => parse_family(default),
        }
    }

    pub fn needlet_family(&self, default: &str) -> Result<NeedletFamily> {
        if let Some(f) = &self.global.family {
            return parse_needlet_family(f);
        }
        match self.cfg.get("family") {
            Some(Value::String(s)) => parse_needlet_family(s),
            Some(v) => serde_json::from_value(v.clone()).context("invalid needlet family in config"),
            None => parse_needlet_family(default),
        }
    }

    pub fn out_path(&self, name: &str) -> Result<PathBuf> {
        let dir: &Path = &self.global.out;
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        Ok(dir.join(name))
    }

    pub fn write(&self, name: &str, contents: &str) -> Result<PathBuf> {
        let p = self.out_path(name)?;
        fs::write(&p, contents).with_context(|| format!("writing {}", p.display()))?;
        Ok(p)
    }

    pub fn write_json(&self, name: &str, v: &Value) -> Result<PathBuf> {
        self.write(name, &(serde_json::to_string_pretty(v)? + "\n"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn family_tags() {
        assert_eq!(parse_family("Jacobi(2, 0.5)").unwrap(), Family::Jacobi { alpha: 2.0, beta: 0.5 });
        assert_eq!(parse_family("laguerre(0,1)").unwrap(), Family::Laguerre { alpha: vec![0.0, 1.0] });
        assert_eq!(parse_family("hermite").unwrap(), Family::Hermite { dim: 1 });
        assert!(parse_family("sphere(1.5)").is_err());
        assert!(parse_family("torus").is_err());
        assert_eq!(parse_needlet_family("laguerre(2)").unwrap(), NeedletFamily::Laguerre { alpha: 2.0 });
        assert_eq!(parse_list::<usize>("32, 64,128").unwrap(), vec![32, 64, 128]);
    }
}
