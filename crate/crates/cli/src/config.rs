//! TOML configuration files.
//!
//! ```toml
//! [base]
//! name = "Z"
//! pic = []             # invariant factors of the class group
//! unit_rank = 0
//! unit_torsion = 2
//!
//! [[place]]
//! name = "5"
//! class = []           # coordinates in pic
//!
//! [log]
//! support = ["5"]
//!
//! [[element]]
//! name = "fifty"
//! torsion = 0          # exponent of the root of unity
//! free = []            # exponents of the fundamental units
//! valuation = { "2" = 1, "5" = 2 }
//!
//! [[monoid]]
//! name = "P"
//! rank = 2
//! generators = [[1, 0], [0, 1]]
//!
//! [[morphism]]
//! name = "u"
//! source = "P"
//! target = "P"
//! matrix = [[2, 0], [0, 2]]
//!
//! [pairing]
//! phi = [2]
//! phi_prime = [2]
//! table = [["1/2"]]
//! ```

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};

use logflat::dedekind::{validate_base, BaseSpec, DedekindLogBase, Divisor, FactoredK, Unit};
use logflat::monodromy::MonodromyData;
use logflat::monoid::{AffineMonoid, MonoidMorphism};
use logflat::{BaseError, FiniteAbelianGroup, Int, IntMatrix, QmodZ};
use serde::Deserialize;
use thiserror::Error;
use toml::Spanned;

/// Environment variable naming the directory searched for config files
/// given by a relative path that does not exist.
pub const CONFIG_DIR_VAR: &str = "LOGFLAT_CONFIG_DIR";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Issue {
    pub field: String,
    pub line: Option<usize>,
    pub message: String,
}

impl fmt::Display for Issue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(l) => write!(f, "line {l}, {}: {}", self.field, self.message),
            None => write!(f, "{}: {}", self.field, self.message),
        }
    }
}

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{0}")]
    Syntax(String),
    #[error("{}", .0.iter().map(|i| i.to_string()).collect::<Vec<_>>().join("\n"))]
    Invalid(Vec<Issue>),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDoc {
    base: Option<Spanned<RawBase>>,
    #[serde(default)]
    place: Vec<Spanned<RawPlace>>,
    log: Option<Spanned<RawLog>>,
    #[serde(default)]
    element: Vec<Spanned<RawElement>>,
    #[serde(default)]
    monoid: Vec<Spanned<RawMonoid>>,
    #[serde(default)]
    morphism: Vec<Spanned<RawMorphism>>,
    pairing: Option<Spanned<RawPairing>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawBase {
    name: Option<String>,
    #[serde(default)]
    pic: Vec<i64>,
    #[serde(default)]
    unit_rank: usize,
    #[serde(default = "one")]
    unit_torsion: i64,
}

fn one() -> i64 {
    1
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPlace {
    name: String,
    #[serde(default)]
    class: Vec<i64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawLog {
    #[serde(default)]
    support: Vec<String>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawElement {
    name: String,
    #[serde(default)]
    torsion: i64,
    #[serde(default)]
    free: Vec<i64>,
    #[serde(default)]
    valuation: BTreeMap<String, i64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMonoid {
    name: String,
    rank: usize,
    generators: Vec<Vec<i64>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMorphism {
    name: String,
    source: String,
    target: String,
    matrix: Vec<Vec<i64>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPairing {
    phi: Vec<i64>,
    phi_prime: Vec<i64>,
    table: Vec<Vec<String>>,
}

/// A parsed and validated configuration.
#[derive(Debug, Clone, Default)]
pub struct ConfigDocument {
    pub base: Option<DedekindLogBase>,
    pub elements: BTreeMap<String, FactoredK>,
    pub monoids: BTreeMap<String, AffineMonoid>,
    pub morphisms: Vec<(String, MonoidMorphism)>,
    pub pairing: Option<MonodromyData>,
}

/// Resolves `path`, falling back to the config directory from the
/// environment for relative paths that do not exist.
pub fn resolve_path(path: &Path) -> PathBuf {
    if path.exists() || path.is_absolute() {
        return path.to_path_buf();
    }
    if let Some(dir) = std::env::var_os(CONFIG_DIR_VAR) {
        let dir = PathBuf::from(dir);
        for candidate in [dir.join(path), dir.join(path).with_extension("toml")] {
            if candidate.exists() {
                return candidate;
            }
        }
    }
    path.to_path_buf()
}

pub fn parse_config(path: &Path) -> Result<ConfigDocument, ConfigError> {
    let path = resolve_path(path);
    let src = std::fs::read_to_string(&path).map_err(|source| ConfigError::Io {
        path: path.clone(),
        source,
    })?;
    parse_config_str(&src)
}

fn line_of(src: &str, offset: usize) -> usize {
    src[..offset.min(src.len())].matches('\n').count() + 1
}

struct Issues<'a> {
    src: &'a str,
    list: Vec<Issue>,
}

impl Issues<'_> {
    fn push(&mut self, field: impl Into<String>, span: Option<std::ops::Range<usize>>, message: impl fmt::Display) {
        self.list.push(Issue {
            field: field.into(),
            line: span.map(|s| line_of(self.src, s.start)),
            message: message.to_string(),
        });
    }
}

pub fn parse_config_str(src: &str) -> Result<ConfigDocument, ConfigError> {
    let raw: RawDoc = toml::from_str(src).map_err(|e| ConfigError::Syntax(e.to_string()))?;
    let mut issues = Issues {
        src,
        list: Vec::new(),
    };
    let mut doc = ConfigDocument::default();

    if raw.base.is_none() && (!raw.place.is_empty() || raw.log.is_some() || !raw.element.is_empty()) {
        issues.push("base", None, "places, log support and elements need a [base] section");
    }
    if let Some(base) = &raw.base {
        let span = base.span();
        let b = base.get_ref();
        let spec = BaseSpec {
            name: b.name.clone().unwrap_or_else(|| "base".into()),
            pic: b.pic.iter().map(|&d| Int::from(d)).collect(),
            places: raw
                .place
                .iter()
                .map(|p| {
                    let p = p.get_ref();
                    (p.name.clone(), p.class.iter().map(|&c| Int::from(c)).collect())
                })
                .collect(),
            unit_rank: b.unit_rank,
            unit_torsion: Int::from(b.unit_torsion),
            log_support: raw
                .log
                .as_ref()
                .map(|l| l.get_ref().support.clone())
                .unwrap_or_default(),
        };
        match validate_base(&spec) {
            Ok(base) => doc.base = Some(base),
            Err(errors) => {
                for e in errors {
                    let (field, at) = locate_base_error(&raw, &e, span.clone());
                    issues.push(field, at, e);
                }
            }
        }
    }

    if let Some(base) = &doc.base {
        for (i, e) in raw.element.iter().enumerate() {
            let span = e.span();
            let e = e.get_ref();
            let mut d = Divisor::zero();
            for (p, v) in &e.valuation {
                d.add_term(p, &Int::from(*v));
            }
            let unit = Unit::new(
                base,
                Int::from(e.torsion),
                e.free.iter().map(|&x| Int::from(x)).collect(),
            );
            let result = unit.and_then(|u| base.element(u, d));
            match result {
                Ok(z) => {
                    if doc.elements.insert(e.name.clone(), z).is_some() {
                        issues.push(format!("element[{i}].name"), Some(span), format!("duplicate element {:?}", e.name));
                    }
                }
                Err(err) => {
                    let field = match err {
                        BaseError::UnitRank { .. } => "free",
                        _ => "valuation",
                    };
                    issues.push(format!("element[{i}].{field}"), Some(span), err);
                }
            }
        }
    }

    for (i, m) in raw.monoid.iter().enumerate() {
        let span = m.span();
        let m = m.get_ref();
        let gens = m.generators.iter().map(|g| g.iter().map(|&x| Int::from(x)).collect()).collect();
        match AffineMonoid::new(m.rank, gens) {
            Ok(monoid) => {
                if doc.monoids.insert(m.name.clone(), monoid).is_some() {
                    issues.push(format!("monoid[{i}].name"), Some(span), format!("duplicate monoid {:?}", m.name));
                }
            }
            Err(e) => issues.push(format!("monoid[{i}].generators"), Some(span), e),
        }
    }

    for (i, u) in raw.morphism.iter().enumerate() {
        let span = u.span();
        let u = u.get_ref();
        let (Some(p), Some(q)) = (doc.monoids.get(&u.source), doc.monoids.get(&u.target)) else {
            let missing = if doc.monoids.contains_key(&u.source) { &u.target } else { &u.source };
            issues.push(format!("morphism[{i}]"), Some(span), format!("unknown monoid {missing:?}"));
            continue;
        };
        let cols = u.matrix.first().map_or(0, |r| r.len());
        if u.matrix.iter().any(|r| r.len() != cols) {
            issues.push(format!("morphism[{i}].matrix"), Some(span), "rows have different lengths");
            continue;
        }
        let rows: Vec<Vec<Int>> = u.matrix.iter().map(|r| r.iter().map(|&x| Int::from(x)).collect()).collect();
        let m = IntMatrix::from_rows(&rows, cols);
        match MonoidMorphism::new(p.clone(), q.clone(), m) {
            Ok(m) => doc.morphisms.push((u.name.clone(), m)),
            Err(e) => issues.push(format!("morphism[{i}].matrix"), Some(span), e),
        }
    }

    if let Some(pairing) = &raw.pairing {
        let span = pairing.span();
        let p = pairing.get_ref();
        let group = |field: &str, orders: &[i64], issues: &mut Issues| {
            FiniteAbelianGroup::from_invariant_factors(orders.iter().map(|&d| Int::from(d)).collect())
                .map_err(|e| issues.push(format!("pairing.{field}"), Some(span.clone()), e))
                .ok()
        };
        let phi = group("phi", &p.phi, &mut issues);
        let psi = group("phi_prime", &p.phi_prime, &mut issues);
        let mut table = Vec::new();
        let mut ok = true;
        for (i, row) in p.table.iter().enumerate() {
            let mut r = Vec::new();
            for (j, s) in row.iter().enumerate() {
                match s.parse::<QmodZ>() {
                    Ok(q) => r.push(q),
                    Err(e) => {
                        ok = false;
                        issues.push(format!("pairing.table[{i}][{j}]"), Some(span.clone()), e);
                    }
                }
            }
            table.push(r);
        }
        if let (Some(phi), Some(psi), true) = (phi, psi, ok) {
            match MonodromyData::new(phi, psi, table) {
                Ok(d) => doc.pairing = Some(d),
                Err(e) => issues.push("pairing.table", Some(span), e),
            }
        }
    }

    if issues.list.is_empty() {
        Ok(doc)
    } else {
        Err(ConfigError::Invalid(issues.list))
    }
}

fn locate_base_error(
    raw: &RawDoc,
    e: &BaseError,
    base_span: std::ops::Range<usize>,
) -> (String, Option<std::ops::Range<usize>>) {
    let place_index = |name: &str, last: bool| {
        let mut it = raw.place.iter().enumerate().filter(|(_, p)| p.get_ref().name == name);
        if last {
            it.next_back()
        } else {
            it.next()
        }
    };
    match e {
        BaseError::PlaceClass { place, .. } => match place_index(place, false) {
            Some((i, p)) => (format!("place[{i}].class"), Some(p.span())),
            None => ("place".into(), None),
        },
        BaseError::DuplicatePlace(place) => match place_index(place, true) {
            Some((i, p)) => (format!("place[{i}].name"), Some(p.span())),
            None => ("place".into(), None),
        },
        BaseError::SupportNotPlace(_) => ("log.support".into(), raw.log.as_ref().map(|l| l.span())),
        BaseError::UnitTorsion(_) => ("base.unit_torsion".into(), Some(base_span)),
        BaseError::Pic(_) => ("base.pic".into(), Some(base_span)),
        _ => ("base".into(), Some(base_span)),
    }
}

/// Parses an element of `K^*`: the name of an `[[element]]` record, or a
/// product such as `2^3*5^-1`, `-1*p2*p3` or `zeta^1*eps1^2`. Factors are
/// place names with optional exponents, `-1`, `zeta` (root of unity) and
/// `eps<i>` (fundamental units).
pub fn parse_element(doc: &ConfigDocument, base: &DedekindLogBase, text: &str) -> anyhow::Result<FactoredK> {
    if let Some(z) = doc.elements.get(text.trim()) {
        return Ok(z.clone());
    }
    let mut torsion = Int::from(0);
    let mut free = vec![Int::from(0); base.unit_rank()];
    let mut div = Divisor::zero();
    for factor in text.split('*').map(str::trim) {
        if factor.is_empty() {
            anyhow::bail!("empty factor in {text:?}");
        }
        if factor == "1" {
            continue;
        }
        if factor == "-1" {
            let w = base.unit_torsion();
            anyhow::ensure!(w % 2 == Int::from(0), "-1 is not a unit of order dividing {w}");
            torsion += w / 2;
            continue;
        }
        let (name, k) = split_power(factor)?;
        if name == "zeta" {
            torsion += k;
        } else if let Some(i) = name.strip_prefix("eps").and_then(|i| i.parse::<usize>().ok()) {
            anyhow::ensure!(i >= 1 && i <= free.len(), "no fundamental unit eps{i}");
            free[i - 1] += k;
        } else {
            anyhow::ensure!(base.has_place(name), "unknown place or element {name:?}");
            div.add_term(name, &k);
        }
    }
    let unit = Unit::new(base, torsion, free)?;
    Ok(base.element(unit, div)?)
}

/// Parses a divisor such as `0`, `p2` or `p2^-1*p3^2`.
pub fn parse_divisor(base: &DedekindLogBase, text: &str) -> anyhow::Result<Divisor> {
    let mut d = Divisor::zero();
    if text.trim() == "0" {
        return Ok(d);
    }
    for factor in text.split('*').map(str::trim) {
        let (name, k) = split_power(factor)?;
        anyhow::ensure!(base.has_place(name), "unknown place {name:?}");
        d.add_term(name, &k);
    }
    Ok(d)
}

fn split_power(factor: &str) -> anyhow::Result<(&str, Int)> {
    match factor.split_once('^') {
        Some((name, k)) => {
            let k: i64 = k
                .trim()
                .parse()
                .map_err(|_| anyhow::anyhow!("bad exponent in {factor:?}"))?;
            Ok((name.trim(), Int::from(k)))
        }
        None => Ok((factor, Int::from(1))),
    }
}

/// Parses comma-separated group coordinates, e.g. `1,0`.
pub fn parse_group_element(
    g: &FiniteAbelianGroup,
    text: &str,
) -> anyhow::Result<logflat::GroupElement> {
    let coords: Vec<Int> = if text.trim().is_empty() {
        vec![]
    } else {
        text.split(',')
            .map(|c| c.trim().parse::<i64>().map(Int::from))
            .collect::<Result<_, _>>()
            .map_err(|_| anyhow::anyhow!("bad group element {text:?}"))?
    };
    Ok(g.element(&coords)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    const Z: &str = r#"
[base]
name = "Z"
unit_torsion = 2

[[place]]
name = "2"
[[place]]
name = "3"
[[place]]
name = "5"

[log]
support = ["5"]

[[element]]
name = "fifty"
valuation = { "2" = 1, "5" = 2 }
"#;

    #[test]
    fn base_z() {
        let doc = parse_config_str(Z).unwrap();
        let b = doc.base.as_ref().unwrap();
        assert_eq!(b.places().len(), 3);
        assert!(b.in_support("5"));
        assert_eq!(doc.elements["fifty"].valuation("5"), Int::from(2));
        let z = parse_element(&doc, b, "-1*2^3*5^-1").unwrap();
        assert_eq!(z.unit().torsion(), &Int::from(1));
        assert_eq!(z.valuation("5"), Int::from(-1));
        assert!(parse_element(&doc, b, "7").is_err());
    }

    #[test]
    fn located_errors() {
        let src = "[base]\npic = [2]\n\n[[place]]\nname = \"p2\"\nclass = [1]\n\n[[place]]\nname = \"p3\"\nclass = [1, 0]\n";
        match parse_config_str(src) {
            Err(ConfigError::Invalid(issues)) => {
                assert_eq!(issues.len(), 1);
                assert_eq!(issues[0].field, "place[1].class");
                assert_eq!(issues[0].line, Some(8));
            }
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse_config_str("[base\n"), Err(ConfigError::Syntax(_))));
        assert!(matches!(parse_config_str("[bogus]\n"), Err(ConfigError::Syntax(_))));
    }

    #[test]
    fn non_principal_element() {
        let src = "[base]\npic = [2]\n[[place]]\nname = \"p2\"\nclass = [1]\n[[element]]\nname = \"x\"\nvaluation = { p2 = 1 }\n";
        match parse_config_str(src) {
            Err(ConfigError::Invalid(issues)) => assert_eq!(issues[0].field, "element[0].valuation"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn monoids_and_pairing() {
        let src = r#"
[[monoid]]
name = "P"
rank = 2
generators = [[1, 0], [0, 1]]

[[morphism]]
name = "u"
source = "P"
target = "P"
matrix = [[2, 0], [0, 2]]

[pairing]
phi = [2]
phi_prime = [2]
table = [["1/2"]]
"#;
        let doc = parse_config_str(src).unwrap();
        assert_eq!(doc.morphisms.len(), 1);
        assert!(doc.pairing.is_some());
        let bad = src.replace("\"1/2\"", "\"1/4\"");
        assert!(matches!(parse_config_str(&bad), Err(ConfigError::Invalid(_))));
    }
}
