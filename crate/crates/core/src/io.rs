//! Algebra files and the content-addressed free-algebra cache.

use crate::algebra::{validate_algebra, FiniteAlgebra, RawAlgebra};
use crate::condition::{ChainCondition, ConditionSpec, DayVariant, Family, Side, TermChain};
use crate::constructions::CounterexampleInstance;
use crate::relation::{Partition, PartitionJson};
use crate::relexpr::parse_identity;
use crate::term::Term;
use crate::error::{Error, Result};
use crate::free::{build_free_algebra_on, FreeAlgebra, Limits, Prov};
use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};
use std::path::{Path, PathBuf};

const ALGEBRA_FIELDS: [&str; 4] = ["name", "size", "operations", "labels"];
const OPERATION_FIELDS: [&str; 3] = ["name", "arity", "table"];

fn unknown_fields(v: &Value, known: &[&str], at: &str, out: &mut Vec<String>) {
    if let Value::Object(map) = v {
        for k in map.keys() {
            if !known.contains(&k.as_str()) {
                out.push(format!("ignoring unknown field {at}{k}"));
            }
        }
    }
}

/// Parses and validates an algebra document; unknown fields are returned as warnings.
pub fn parse_algebra(text: &str) -> Result<(FiniteAlgebra, Vec<String>)> {
    let v: Value = serde_json::from_str(text)?;
    let mut warnings = Vec::new();
    unknown_fields(&v, &ALGEBRA_FIELDS, "", &mut warnings);
    if let Some(Value::Array(ops)) = v.get("operations") {
        for (i, op) in ops.iter().enumerate() {
            unknown_fields(op, &OPERATION_FIELDS, &format!("operations[{i}]."), &mut warnings);
        }
    }
    let raw: RawAlgebra = serde_json::from_value(v)?;
    Ok((validate_algebra(raw)?, warnings))
}

pub fn load_algebra(path: &Path) -> Result<(FiniteAlgebra, Vec<String>)> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    parse_algebra(&text).map_err(|e| match e {
        Error::Schema(m) => Error::Schema(format!("{}: {m}", path.display())),
        other => other,
    })
}

pub fn algebra_json(alg: &FiniteAlgebra) -> String {
    serde_json::to_string_pretty(alg).expect("algebras serialize")
}

pub fn save_algebra(alg: &FiniteAlgebra, path: &Path) -> Result<()> {
    std::fs::write(path, algebra_json(alg) + "\n").map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

/// Content-addressed store of free algebras.
#[derive(Debug, Clone)]
pub struct Cache {
    pub dir: PathBuf,
}

#[derive(Serialize, Deserialize)]
struct CachedFree {
    k: usize,
    points: Vec<Vec<u32>>,
    data: String,
    provenance: Vec<Prov>,
    projections: Vec<usize>,
}

impl Cache {
    /// `MALTSEV_CACHE`, else `$XDG_CACHE_HOME/maltsev`, else `$HOME/.cache/maltsev`.
    pub fn from_env() -> Option<Cache> {
        let env = |k: &str| std::env::var_os(k).filter(|v| !v.is_empty()).map(PathBuf::from);
        let dir = env("MALTSEV_CACHE")
            .or_else(|| env("XDG_CACHE_HOME").map(|d| d.join("maltsev")))
            .or_else(|| env("HOME").map(|d| d.join(".cache").join("maltsev")))?;
        Some(Cache { dir })
    }

    /// Hash of the generator tables, the arity and the point set name.
    pub fn key(generators: &[FiniteAlgebra], k: usize, points: &str) -> String {
        let mut h = Sha256::new();
        h.update(format!("free/v1/k={k}/points={points}\n"));
        for g in generators {
            h.update(format!("{}:", g.size));
            for op in &g.operations {
                h.update(format!("{}/{}:", op.name, op.arity));
                for v in &op.table {
                    h.update(v.to_le_bytes());
                }
            }
            h.update(b"\n");
        }
        hex::encode(h.finalize())
    }

    fn path(&self, key: &str) -> PathBuf {
        self.dir.join(format!("{key}.json"))
    }

    pub fn load(&self, generators: &[FiniteAlgebra], key: &str) -> Option<FreeAlgebra> {
        let text = std::fs::read_to_string(self.path(key)).ok()?;
        let c: CachedFree = serde_json::from_str(&text).ok()?;
        let data = hex::decode(c.data).ok()?;
        let free = FreeAlgebra::from_parts(generators.to_vec(), c.k, c.points, data, c.provenance, c.projections, true).ok()?;
        // A damaged entry is treated as a miss.
        let ok = free.points.len() == generators.len()
            && free.projections.iter().all(|&p| p < free.len())
            && free.points.iter().zip(generators).all(|(p, g)| p.iter().all(|&q| (q as usize) < g.size.pow(c.k as u32)));
        ok.then_some(free)
    }

    /// Stores a complete free algebra; incomplete ones depend on budgets and are skipped.
    pub fn store(&self, key: &str, free: &FreeAlgebra) -> Result<()> {
        if !free.complete {
            return Ok(());
        }
        std::fs::create_dir_all(&self.dir)?;
        let c = CachedFree {
            k: free.k,
            points: free.points.clone(),
            data: hex::encode(free.raw_data()),
            provenance: free.provenance.clone(),
            projections: free.projections.clone(),
        };
        let tmp = self.dir.join(format!("{key}.tmp{}", std::process::id()));
        std::fs::write(&tmp, serde_json::to_string(&c)?)?;
        std::fs::rename(&tmp, self.path(key))?;
        Ok(())
    }
}

/// Builds a free algebra, reusing a cached copy when available.
pub fn cached_free_algebra(
    cache: Option<&Cache>,
    generators: &[FiniteAlgebra],
    k: usize,
    points: &str,
    keep: impl Fn(&[usize]) -> bool,
    limits: Limits,
) -> Result<FreeAlgebra> {
    let key = Cache::key(generators, k, points);
    if let Some(free) = cache.and_then(|c| c.load(generators, &key)) {
        return Ok(free);
    }
    let free = build_free_algebra_on(generators, k, keep, limits)?;
    if let Some(c) = cache {
        // The cache is an optimization; a failed write is not an error.
        let _ = c.store(&key, &free);
    }
    Ok(free)
}

/// Chain document: a condition tag and the term strings `t_0..t_n`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainJson {
    pub condition: String,
    pub terms: Vec<String>,
}

pub fn chain_json(chain: &TermChain) -> ChainJson {
    ChainJson {
        condition: chain.condition.tag(),
        terms: chain.strings(),
    }
}

fn sides(s: &str) -> Result<Vec<Side>> {
    s.chars()
        .map(|c| match c {
            'x' => Ok(Side::X),
            'z' => Ok(Side::Z),
            _ => Err(Error::Invalid(format!("link side must be x or z, got {c}"))),
        })
        .collect()
}

/// Parses a condition tag for a chain of `n` steps: a preset name, `day`,
/// `reversed-day` (optionally `m=K`) or `mixed l=.. r=.. idem=..`.
pub fn parse_condition(tag: &str, n: usize) -> Result<ChainCondition> {
    let mut words = tag.split_whitespace();
    let head = words.next().ok_or_else(|| Error::Invalid("empty condition tag".into()))?;
    let mut fields = std::collections::BTreeMap::new();
    for w in words {
        let (k, v) = w
            .split_once('=')
            .ok_or_else(|| Error::Invalid(format!("expected key=value, got {w}")))?;
        fields.insert(k, v);
    }
    let check_len = |key: &str| -> Result<()> {
        match fields.get(key) {
            Some(v) if v.parse::<usize>().ok() != Some(n) => Err(Error::Shape(format!(
                "condition says {key}={v} but {} terms were given",
                n + 1
            ))),
            _ => Ok(()),
        }
    };
    match head {
        "day" | "reversed-day" => {
            check_len("m")?;
            let variant = if head == "day" { DayVariant::Standard } else { DayVariant::Reversed };
            Ok(ChainCondition::Day { variant, m: n })
        }
        "mixed" => {
            check_len("n")?;
            let get = |k: &str| fields.get(k).copied().unwrap_or("");
            let idem = get("idem")
                .chars()
                .map(|c| match c {
                    '1' => Ok(true),
                    '0' => Ok(false),
                    _ => Err(Error::Invalid(format!("idem flags are 0 or 1, got {c}"))),
                })
                .collect::<Result<Vec<bool>>>()?;
            Ok(ChainCondition::Mixed(ConditionSpec::new(n, sides(get("l"))?, sides(get("r"))?, idem)?))
        }
        name => {
            let family = Family::parse(name)?;
            if family.is_day() {
                return Err(Error::Invalid(format!("{name} is a Day family; use day or reversed-day")));
            }
            let spec = family
                .spec(n)
                .ok_or_else(|| Error::Invalid(format!("{name} is not defined at n = {n}")))?;
            Ok(ChainCondition::Mixed(spec))
        }
    }
}

pub fn chain_from_json(doc: &ChainJson) -> Result<TermChain> {
    if doc.terms.is_empty() {
        return Err(Error::Shape("a chain needs at least two terms".into()));
    }
    let terms = doc.terms.iter().map(|t| Term::parse(t)).collect::<Result<Vec<_>>>()?;
    TermChain::new(parse_condition(&doc.condition, terms.len() - 1)?, terms)
}

pub fn load_chain(path: &Path) -> Result<TermChain> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    chain_from_json(&serde_json::from_str(&text)?)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct ExpectedJson {
    name: String,
    pair: [usize; 2],
    elements: Vec<(String, usize)>,
    tuples: Vec<Vec<usize>>,
    full_size: usize,
}

fn write(path: &Path, text: String) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

/// Writes `algebra.json`, `bindings.json`, `identity.txt` and `expected.json` into `dir`.
pub fn save_instance(inst: &CounterexampleInstance, dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    save_algebra(&inst.algebra, &dir.join("algebra.json"))?;
    let bindings: std::collections::BTreeMap<String, PartitionJson> =
        inst.bindings.iter().map(|(k, p)| (k.to_string(), p.into())).collect();
    write(&dir.join("bindings.json"), serde_json::to_string_pretty(&bindings)? + "\n")?;
    write(&dir.join("identity.txt"), format!("{}\n", inst.identity))?;
    let e = ExpectedJson {
        name: inst.name.clone(),
        pair: [inst.expected.0, inst.expected.1],
        elements: inst.elements.clone(),
        tuples: inst.tuples.clone(),
        full_size: inst.full_size,
    };
    write(&dir.join("expected.json"), serde_json::to_string_pretty(&e)? + "\n")
}

pub fn load_instance(dir: &Path) -> Result<CounterexampleInstance> {
    let (algebra, _) = load_algebra(&dir.join("algebra.json"))?;
    let raw: std::collections::BTreeMap<String, PartitionJson> = serde_json::from_str(&read(&dir.join("bindings.json"))?)?;
    let mut bindings = std::collections::BTreeMap::new();
    for (k, p) in raw {
        let mut cs = k.chars();
        let c = match (cs.next(), cs.next()) {
            (Some(c), None) => c,
            _ => return Err(Error::Schema(format!("binding name must be one letter, got {k}"))),
        };
        let p = Partition::try_from(p)?;
        if p.size() != algebra.size {
            return Err(Error::SizeMismatch(p.size(), algebra.size));
        }
        bindings.insert(c, p);
    }
    let identity = parse_identity(read(&dir.join("identity.txt"))?.trim())?;
    let e: ExpectedJson = serde_json::from_str(&read(&dir.join("expected.json"))?)?;
    if e.pair.iter().any(|&v| v >= algebra.size) {
        return Err(Error::ElementOutOfRange(e.pair[0].max(e.pair[1])));
    }
    Ok(CounterexampleInstance {
        name: e.name,
        algebra,
        tuples: e.tuples,
        full_size: e.full_size,
        bindings,
        identity,
        elements: e.elements,
        expected: (e.pair[0], e.pair[1]),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::{make_base, variety_preset, BaseKind};

    #[test]
    fn chain_round_trip() {
        let c = crate::constructions::operation_chain(Family::Jonsson, 4).unwrap();
        let j = chain_json(&c);
        assert_eq!(j.condition, "mixed n=4 l=xzx r=zxz idem=111");
        assert_eq!(chain_from_json(&j).unwrap(), c);
        let named = ChainJson { condition: "jonsson".into(), terms: j.terms.clone() };
        assert_eq!(chain_from_json(&named).unwrap(), c);
        let bad = ChainJson { condition: "day m=3".into(), terms: j.terms };
        assert!(chain_from_json(&bad).is_err());
    }

    #[test]
    fn instance_bundle_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let inst = crate::constructions::baker_plus_instances().unwrap().remove(1);
        save_instance(&inst, dir.path()).unwrap();
        let back = load_instance(dir.path()).unwrap();
        assert_eq!(back.algebra, inst.algebra);
        assert_eq!(back.bindings, inst.bindings);
        assert_eq!(back.identity, inst.identity);
        assert!(back.check().unwrap().fails_as_expected());
    }

    #[test]
    fn save_load_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let c4 = make_base(BaseKind::Chain(4)).unwrap();
        let p = dir.path().join("c4.json");
        save_algebra(&c4, &p).unwrap();
        let (back, warnings) = load_algebra(&p).unwrap();
        assert_eq!(back, c4);
        assert!(warnings.is_empty());
    }

    #[test]
    fn truncated_and_unknown_fields() {
        let text = algebra_json(&make_base(BaseKind::Bool2).unwrap());
        assert!(matches!(parse_algebra(&text[..text.len() / 2]), Err(Error::Schema(_))));
        let extra = text.replacen('{', "{\"comment\": 1,", 1);
        let (_, w) = parse_algebra(&extra).unwrap();
        assert_eq!(w, vec!["ignoring unknown field comment".to_string()]);
        let bad = r#"{"name":"x","size":2,"operations":[{"name":"m","arity":2,"table":[0,0,0]}]}"#;
        assert!(matches!(parse_algebra(bad), Err(Error::TableLength { .. })));
    }

    #[test]
    fn cache_hit_matches_fresh_build() {
        let dir = tempfile::tempdir().unwrap();
        let cache = Cache { dir: dir.path().to_path_buf() };
        let gens = variety_preset('a', 4).unwrap();
        let lim = Limits::elements(1000);
        let a = cached_free_algebra(Some(&cache), &gens, 3, "all", |_| true, lim).unwrap();
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
        let b = cached_free_algebra(Some(&cache), &gens, 3, "all", |_| true, lim).unwrap();
        assert_eq!(a.raw_data(), b.raw_data());
        assert_eq!(a.provenance, b.provenance);
        let other = Cache::key(&gens, 4, "all");
        assert_ne!(other, Cache::key(&gens, 3, "all"));
    }
}
