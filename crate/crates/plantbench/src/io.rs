//! Instance files (TOML) and the plain dense matrix format.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use plantbench_core::instance::{
    build_couplings_with, coarse_grain, generate_orthogonal_patterns, CatalogueId, Coupling, CouplingRule, Instance,
    PatternOrigin, PatternSet, Source,
};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::{Error, Result};

pub const FORMAT_VERSION: u32 = 1;

/// Above this size, Hadamard pattern sets are stored as a generator seed and
/// the dense matrix is omitted unless requested.
pub const DENSE_LIMIT: usize = 64;

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct InstanceFile {
    format_version: u32,
    label: String,
    n: usize,
    seed: i64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    rule: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    coarse_grain: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    k: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    w0: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    dw: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    weights: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    explicit_weights: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    generator: Option<Generator>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    patterns: Option<Vec<Vec<i8>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    perturbations: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    coupling: Option<Vec<Vec<f64>>>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Generator {
    kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    seed: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    id: Option<String>,
}

fn seed_to_toml(seed: u64) -> Result<i64> {
    i64::try_from(seed).map_err(|_| Error::Validation(format!("seed {seed} does not fit a signed 64-bit integer")))
}

fn seed_from_toml(seed: i64, path: &Path) -> Result<u64> {
    u64::try_from(seed).map_err(|_| Error::format(path, "seeds must be non-negative"))
}

fn rule_name(rule: CouplingRule) -> &'static str {
    match rule {
        CouplingRule::Hebb => "hebb",
        CouplingRule::Pseudoinverse => "pseudoinverse",
    }
}

pub fn parse_rule(s: &str) -> Option<CouplingRule> {
    match s {
        "hebb" => Some(CouplingRule::Hebb),
        "pseudoinverse" => Some(CouplingRule::Pseudoinverse),
        _ => None,
    }
}

fn rows(c: &Coupling) -> Vec<Vec<f64>> {
    (0..c.n()).map(|i| c.row(i).to_vec()).collect()
}

/// Serializes an instance. `dense` forces the coupling matrix into the file
/// even above [`DENSE_LIMIT`].
pub fn instance_to_string(inst: &Instance, dense: bool) -> Result<String> {
    let mut f = InstanceFile {
        format_version: FORMAT_VERSION,
        label: inst.label.clone(),
        n: inst.n,
        seed: seed_to_toml(inst.seed)?,
        rule: None,
        coarse_grain: inst.coarse_grain,
        k: None,
        w0: None,
        dw: None,
        weights: None,
        explicit_weights: false,
        generator: None,
        patterns: None,
        perturbations: None,
        coupling: None,
    };
    let small = inst.n <= DENSE_LIMIT;
    match &inst.source {
        Source::External => f.coupling = Some(rows(&inst.coupling)),
        Source::Patterns(ps) => {
            f.rule = Some(rule_name(inst.rule).into());
            f.k = Some(ps.k());
            f.w0 = Some(ps.w0());
            f.dw = Some(ps.dw());
            f.weights = Some(ps.weights().to_vec());
            f.explicit_weights = ps.has_explicit_weights();
            let mut store_patterns = true;
            match ps.origin() {
                PatternOrigin::Hadamard { seed } => {
                    f.generator = Some(Generator {
                        kind: "hadamard".into(),
                        seed: Some(seed_to_toml(*seed)?),
                        id: None,
                    });
                    store_patterns = small;
                }
                PatternOrigin::Catalogue(id) => {
                    f.generator = Some(Generator {
                        kind: "catalogue".into(),
                        seed: None,
                        id: Some(id.as_str().into()),
                    });
                }
                PatternOrigin::Explicit => {}
            }
            if store_patterns {
                f.patterns = Some(ps.patterns().to_vec());
            }
            f.perturbations = ps.perturbations().map(<[Vec<f64>]>::to_vec);
            if small || dense {
                f.coupling = Some(rows(&inst.coupling));
            }
        }
    }
    toml::to_string(&f).map_err(|e| Error::Validation(format!("cannot serialize instance: {e}")))
}

pub fn save_instance(inst: &Instance, path: &Path, dense: bool) -> Result<()> {
    let text = instance_to_string(inst, dense)?;
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

pub fn load_instance(path: &Path) -> Result<Instance> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    instance_from_str(&text, path)
}

/// Parses and validates an instance file. Pattern-based instances are
/// rebuilt from their patterns; a stored dense matrix must agree exactly.
pub fn instance_from_str(text: &str, path: &Path) -> Result<Instance> {
    let f: InstanceFile = toml::from_str(text).map_err(|e| Error::format(path, e.to_string()))?;
    if f.format_version != FORMAT_VERSION {
        return Err(Error::format(path, format!("unsupported format_version {}", f.format_version)));
    }
    let seed = seed_from_toml(f.seed, path)?;
    let stored = match &f.coupling {
        Some(r) => {
            if r.len() != f.n {
                return Err(Error::format(path, format!("coupling has {} rows, expected {}", r.len(), f.n)));
            }
            Some(Coupling::from_rows(r).map_err(|e| Error::format(path, e.to_string()))?)
        }
        None => None,
    };
    let has_patterns = f.patterns.is_some() || f.generator.is_some();
    if !has_patterns {
        let coupling = stored.ok_or_else(|| Error::format(path, "external instance needs a coupling matrix"))?;
        let mut inst = Instance::external(coupling, f.label);
        inst.seed = seed;
        inst.coarse_grain = f.coarse_grain;
        return Ok(inst);
    }

    let k = f.k.ok_or_else(|| Error::format(path, "missing `k`"))?;
    let w0 = f.w0.ok_or_else(|| Error::format(path, "missing `w0`"))?;
    let dw = f.dw.ok_or_else(|| Error::format(path, "missing `dw`"))?;
    let (origin, regenerated) = match &f.generator {
        None => (PatternOrigin::Explicit, None),
        Some(g) => match g.kind.as_str() {
            "hadamard" => {
                let s = seed_from_toml(g.seed.ok_or_else(|| Error::format(path, "hadamard generator needs `seed`"))?, path)?;
                let ps = generate_orthogonal_patterns(f.n, k, s)?;
                (PatternOrigin::Hadamard { seed: s }, Some(ps.patterns().to_vec()))
            }
            "catalogue" => {
                let id: CatalogueId = g
                    .id
                    .as_deref()
                    .ok_or_else(|| Error::format(path, "catalogue generator needs `id`"))?
                    .parse()?;
                (PatternOrigin::Catalogue(id), None)
            }
            other => return Err(Error::format(path, format!("unknown generator kind `{other}`"))),
        },
    };
    let patterns = match (f.patterns, regenerated) {
        (Some(p), Some(r)) if p != r => {
            return Err(Error::format(path, "stored patterns differ from the generator output"));
        }
        (Some(p), _) => p,
        (None, Some(r)) => r,
        (None, None) => return Err(Error::format(path, "missing `patterns`")),
    };
    if patterns.len() != k {
        return Err(Error::format(path, format!("`k` is {k} but {} patterns are stored", patterns.len())));
    }
    if patterns.iter().any(|p| p.len() != f.n) {
        return Err(Error::format(path, format!("every pattern must have length {}", f.n)));
    }
    let ps = if f.explicit_weights {
        let w = f.weights.ok_or_else(|| Error::format(path, "explicit weights are missing"))?;
        PatternSet::with_weights(patterns, w0, dw, w)?
    } else {
        let ps = PatternSet::new(patterns, w0, dw)?;
        if let Some(w) = &f.weights {
            if w.as_slice() != ps.weights() {
                return Err(Error::format(path, "stored weights do not follow w0 + m * dw"));
            }
        }
        ps
    };
    let ps = ps.with_perturbations(f.perturbations)?.with_origin(origin);
    let rule = match f.rule.as_deref() {
        None => CouplingRule::Hebb,
        Some(r) => parse_rule(r).ok_or_else(|| Error::format(path, format!("unknown rule `{r}`")))?,
    };
    let mut inst = build_couplings_with(&ps, rule)?;
    if let Some(dj) = f.coarse_grain {
        inst = coarse_grain(&inst, dj)?;
    }
    inst.label = f.label;
    inst.seed = seed;
    if let Some(c) = stored {
        if c != inst.coupling {
            return Err(Error::format(path, "stored coupling matrix disagrees with the patterns"));
        }
    }
    Ok(inst)
}

/// Plain dense text: `N` on the first line, then `N` whitespace-separated
/// rows.
pub fn dense_to_string(c: &Coupling) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "{}", c.n());
    for i in 0..c.n() {
        let row: Vec<String> = c.row(i).iter().map(|v| format!("{v}")).collect();
        let _ = writeln!(s, "{}", row.join(" "));
    }
    s
}

pub fn write_dense(c: &Coupling, path: &Path) -> Result<()> {
    fs::write(path, dense_to_string(c)).map_err(|e| Error::io(path, e))
}

pub fn dense_from_str(text: &str, path: &Path) -> Result<Coupling> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let n: usize = lines
        .next()
        .ok_or_else(|| Error::format(path, "empty file"))?
        .trim()
        .parse()
        .map_err(|_| Error::format(path, "first line must be the dimension"))?;
    let mut data = Vec::with_capacity(n * n);
    for (i, line) in lines.enumerate() {
        for tok in line.split_whitespace() {
            let v: f64 = tok
                .parse()
                .map_err(|_| Error::format(path, format!("row {}: cannot parse `{tok}`", i + 1)))?;
            data.push(v);
        }
    }
    if data.len() != n * n {
        return Err(Error::format(path, format!("expected {} entries, found {}", n * n, data.len())));
    }
    Coupling::from_dense(n, data).map_err(|e| Error::format(path, e.to_string()))
}

pub fn read_dense(path: &Path) -> Result<Coupling> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    dense_from_str(&text, path)
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    let digest = Sha256::digest(bytes);
    let mut s = String::with_capacity(64);
    for b in digest.iter() {
        let _ = write!(s, "{b:02x}");
    }
    s
}

pub fn sha256_file(path: &Path) -> Result<String> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    Ok(sha256_hex(&bytes))
}

#[cfg(test)]
mod tests {
    use super::*;
    use plantbench_core::instance::{
        build_couplings, coarse_grain, generate_small_scale, perturb_patterns, small_scale_patterns, EWeighting,
    };

    fn roundtrip(inst: &Instance, dense: bool) -> Instance {
        let text = instance_to_string(inst, dense).unwrap();
        instance_from_str(&text, Path::new("mem")).unwrap()
    }

    #[test]
    fn catalogue_roundtrip_is_exact() {
        for id in CatalogueId::ALL {
            for w in [EWeighting::LastHeaviest, EWeighting::Literal] {
                let inst = generate_small_scale(id, w);
                assert_eq!(roundtrip(&inst, false), inst);
            }
        }
    }

    #[test]
    fn reloaded_a_keeps_its_distances() {
        let inst = roundtrip(&generate_small_scale(CatalogueId::A, EWeighting::default()), false);
        let ps = inst.patterns().unwrap();
        assert_eq!((ps.distance(0, 1), ps.distance(1, 2), ps.distance(0, 2)), (1, 3, 4));
    }

    #[test]
    fn perturbed_and_coarse_roundtrip() {
        let ps = small_scale_patterns(CatalogueId::C, EWeighting::default());
        let ps = perturb_patterns(&ps, &[(0, 5, -0.37), (2, 1, 0.1)]).unwrap();
        let inst = coarse_grain(&build_couplings(&ps), 0.05).unwrap();
        assert_eq!(roundtrip(&inst, false), inst);
    }

    #[test]
    fn large_orthogonal_sets_store_only_the_generator() {
        let ps = generate_orthogonal_patterns(128, 5, 3).unwrap().with_dw(0.001).unwrap();
        let inst = build_couplings(&ps);
        let text = instance_to_string(&inst, false).unwrap();
        assert!(!text.contains("patterns"));
        assert!(!text.contains("coupling ="));
        assert_eq!(instance_from_str(&text, Path::new("mem")).unwrap(), inst);
        assert_eq!(roundtrip(&inst, true), inst);
    }

    #[test]
    fn external_roundtrip() {
        let c = Coupling::from_rows(&[vec![0.0, 0.1 + 0.2], vec![0.1 + 0.2, 0.0]]).unwrap();
        let inst = Instance::external(c, "ext");
        assert_eq!(roundtrip(&inst, false), inst);
    }

    #[test]
    fn asymmetric_file_is_rejected() {
        let text = "format_version = 1\nlabel = \"x\"\nn = 2\nseed = 0\ncoupling = [[0.0, 1.0], [2.0, 0.0]]\n";
        let err = instance_from_str(text, Path::new("bad.toml")).unwrap_err();
        assert_eq!(err.exit_code(), 3);
        assert!(err.to_string().contains("not symmetric"));
    }

    #[test]
    fn tampered_coupling_is_rejected() {
        let inst = generate_small_scale(CatalogueId::B, EWeighting::default());
        let text = instance_to_string(&inst, false).unwrap();
        let j01 = inst.coupling.get(0, 1);
        let tampered = text.replacen(&format!("[0.0, {j01}"), &format!("[0.0, {}", j01 + 1.0), 1);
        assert_ne!(tampered, text);
        assert!(instance_from_str(&tampered, Path::new("t")).is_err());
    }

    #[test]
    fn dense_roundtrip_and_validation() {
        let inst = generate_small_scale(CatalogueId::F, EWeighting::default());
        let s = dense_to_string(&inst.coupling);
        assert!(s.starts_with("8\n"));
        assert_eq!(dense_from_str(&s, Path::new("d")).unwrap(), inst.coupling);
        assert!(dense_from_str("2\n0 1\n1.5 0\n", Path::new("d")).is_err());
        assert!(dense_from_str("2\n0 1\n1 0 4\n", Path::new("d")).is_err());
    }

    #[test]
    fn hash_is_stable() {
        assert_eq!(
            sha256_hex(b"abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
    }
}
