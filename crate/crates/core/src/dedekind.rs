//! A Dedekind base with a log structure, described by data.
//!
//! The base is a finite set of named closed points, the class group with the
//! class of each point, the unit group `Z/w × Z^r`, and the log support `D`
//! (the points outside the open set defining the log structure). Elements of
//! `K^*` are modeled as a unit times a principal divisor: nothing is ever
//! factored here, the user supplies the factorizations.
//!
//! `H^1_kpl(X, G_m)` is taken to be `DivRat(X, D) / Divp(X)`, where `DivRat`
//! allows rational coefficients at points of `D`. A class is stored by its
//! fractional parts on `D` and the class in `Pic(X)` of the integral part.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::BaseError;
use crate::lattice::{hermite_rows, integer_kernel, floor_div};
use crate::{FiniteAbelianGroup, GroupElement, Int, IntMatrix, QmodZ};

/// Raw base data as read from a file, before validation.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct BaseSpec {
    pub name: String,
    pub pic: Vec<Int>,
    /// `(place name, class coordinates in pic)`.
    pub places: Vec<(String, Vec<Int>)>,
    pub unit_rank: usize,
    pub unit_torsion: Int,
    pub log_support: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DedekindLogBase {
    name: String,
    pic: FiniteAbelianGroup,
    places: Vec<String>,
    place_class: BTreeMap<String, GroupElement>,
    unit_rank: usize,
    #[serde(serialize_with = "crate::json::ser_int")]
    unit_torsion: Int,
    log_support: BTreeSet<String>,
}

/// Checks every invariant of the base data, collecting all violations.
pub fn validate_base(spec: &BaseSpec) -> Result<DedekindLogBase, Vec<BaseError>> {
    let mut errors = Vec::new();
    let pic = match FiniteAbelianGroup::from_invariant_factors(spec.pic.clone()) {
        Ok(g) => g,
        Err(e) => {
            errors.push(BaseError::Pic(e));
            FiniteAbelianGroup::trivial()
        }
    };
    let mut places = Vec::new();
    let mut place_class = BTreeMap::new();
    for (name, coords) in &spec.places {
        if place_class.contains_key(name) {
            errors.push(BaseError::DuplicatePlace(name.clone()));
            continue;
        }
        match pic.element(coords) {
            Ok(c) => {
                places.push(name.clone());
                place_class.insert(name.clone(), c);
            }
            Err(source) => errors.push(BaseError::PlaceClass {
                place: name.clone(),
                source,
            }),
        }
    }
    if spec.unit_torsion < Int::one() {
        errors.push(BaseError::UnitTorsion(spec.unit_torsion.to_string()));
    }
    let mut log_support = BTreeSet::new();
    for p in &spec.log_support {
        if spec.places.iter().any(|(n, _)| n == p) {
            log_support.insert(p.clone());
        } else {
            errors.push(BaseError::SupportNotPlace(p.clone()));
        }
    }
    if !errors.is_empty() {
        return Err(errors);
    }
    Ok(DedekindLogBase {
        name: spec.name.clone(),
        pic,
        places,
        place_class,
        unit_rank: spec.unit_rank,
        unit_torsion: spec.unit_torsion.clone(),
        log_support,
    })
}

impl DedekindLogBase {
    /// The integers with the given primes as places, log structure along `support`.
    pub fn integers(primes: &[u64], support: &[u64]) -> Self {
        validate_base(&BaseSpec {
            name: "Z".into(),
            pic: vec![],
            places: primes.iter().map(|p| (p.to_string(), vec![])).collect(),
            unit_rank: 0,
            unit_torsion: Int::from(2),
            log_support: support.iter().map(|p| p.to_string()).collect(),
        })
        .expect("well-formed base")
    }

    /// A discrete valuation ring with its closed point `s` in the log support.
    pub fn dvr() -> Self {
        validate_base(&BaseSpec {
            name: "dvr".into(),
            pic: vec![],
            places: vec![("s".into(), vec![])],
            unit_rank: 0,
            unit_torsion: Int::one(),
            log_support: vec!["s".into()],
        })
        .expect("well-formed base")
    }

    /// The ring of integers of `Q(sqrt(-5))` with the primes above 2, 3, 5, 7.
    /// `Pic = Z/2`, and `p2, p3, p3', p7, p7'` are the non-principal ones.
    pub fn q_sqrt_minus_5(support: &[&str]) -> Self {
        let places = [("p2", 1), ("p3", 1), ("p3'", 1), ("p5", 0), ("p7", 1), ("p7'", 1)];
        validate_base(&BaseSpec {
            name: "Q(sqrt(-5))".into(),
            pic: vec![Int::from(2)],
            places: places
                .iter()
                .map(|(n, c)| (n.to_string(), vec![Int::from(*c)]))
                .collect(),
            unit_rank: 0,
            unit_torsion: Int::from(2),
            log_support: support.iter().map(|s| s.to_string()).collect(),
        })
        .expect("well-formed base")
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn pic(&self) -> &FiniteAbelianGroup {
        &self.pic
    }

    pub fn places(&self) -> &[String] {
        &self.places
    }

    pub fn unit_rank(&self) -> usize {
        self.unit_rank
    }

    pub fn unit_torsion(&self) -> &Int {
        &self.unit_torsion
    }

    pub fn log_support(&self) -> &BTreeSet<String> {
        &self.log_support
    }

    pub fn in_support(&self, place: &str) -> bool {
        self.log_support.contains(place)
    }

    pub fn has_place(&self, place: &str) -> bool {
        self.place_class.contains_key(place)
    }

    pub fn place_class(&self, place: &str) -> Result<&GroupElement, BaseError> {
        self.place_class
            .get(place)
            .ok_or_else(|| BaseError::UnknownPlace(place.to_string()))
    }

    /// The same base with another log support.
    pub fn with_support(&self, support: &[&str]) -> Result<Self, BaseError> {
        let mut b = self.clone();
        b.log_support.clear();
        for p in support {
            if !self.has_place(p) {
                return Err(BaseError::SupportNotPlace(p.to_string()));
            }
            b.log_support.insert(p.to_string());
        }
        Ok(b)
    }

    /// Builds a divisor from `(place, coefficient)` pairs.
    pub fn divisor(&self, terms: &[(&str, i64)]) -> Result<Divisor, BaseError> {
        let mut d = Divisor::zero();
        for (p, c) in terms {
            if !self.has_place(p) {
                return Err(BaseError::UnknownPlace(p.to_string()));
            }
            d.add_term(p, &Int::from(*c));
        }
        Ok(d)
    }

    pub fn check_divisor(&self, d: &Divisor) -> Result<(), BaseError> {
        match d.0.keys().find(|p| !self.has_place(p)) {
            Some(p) => Err(BaseError::UnknownPlace(p.clone())),
            None => Ok(()),
        }
    }

    pub fn unit(&self, torsion: i64, free: &[i64]) -> Result<Unit, BaseError> {
        Unit::new(
            self,
            Int::from(torsion),
            free.iter().map(|&x| Int::from(x)).collect(),
        )
    }

    /// `z = unit · (generator of the principal divisor d)`.
    pub fn element(&self, unit: Unit, divisor: Divisor) -> Result<FactoredK, BaseError> {
        self.check_divisor(&divisor)?;
        let class = class_of_divisor(self, &divisor)?;
        if !class.is_zero() {
            return Err(BaseError::NotPrincipal {
                divisor: divisor.to_string(),
                class: class.to_string(),
            });
        }
        Ok(FactoredK {
            base: self.name.clone(),
            unit,
            divisor,
        })
    }

    /// An element with trivial unit part.
    pub fn element_from(&self, terms: &[(&str, i64)]) -> Result<FactoredK, BaseError> {
        let d = self.divisor(terms)?;
        self.element(Unit::one(self), d)
    }

    pub fn one(&self) -> FactoredK {
        FactoredK {
            base: self.name.clone(),
            unit: Unit::one(self),
            divisor: Divisor::zero(),
        }
    }

    /// Hermite basis of the principal divisors supported on `places`
    /// (coordinates in the order given).
    pub fn principal_lattice(&self, places: &[String]) -> Result<Vec<Vec<Int>>, BaseError> {
        let k = self.pic.rank();
        let s = places.len();
        if s == 0 {
            return Ok(vec![]);
        }
        if k == 0 {
            return Ok(hermite_rows(
                &(0..s)
                    .map(|i| (0..s).map(|j| Int::from((i == j) as i64)).collect())
                    .collect::<Vec<_>>(),
                s,
            ));
        }
        // kernel of (c, t) -> Σ c_p·class(p) + Σ t_i·d_i·e_i, projected to c
        let mut m = IntMatrix::zeros(k, s + k);
        for (j, p) in places.iter().enumerate() {
            let c = self.place_class(p)?;
            for i in 0..k {
                m[(i, j)] = c.coords()[i].clone();
            }
        }
        for (i, d) in self.pic.invariant_factors().iter().enumerate() {
            m[(i, s + i)] = d.clone();
        }
        let ker = integer_kernel(&m);
        let proj: Vec<Vec<Int>> = ker.iter().map(|v| v[..s].to_vec()).collect();
        Ok(hermite_rows(&proj, s))
    }
}

impl fmt::Display for DedekindLogBase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let d: Vec<&str> = self.log_support.iter().map(|s| s.as_str()).collect();
        write!(
            f,
            "{} (Pic = {}, units Z/{} x Z^{}, places {}, D = {{{}}})",
            self.name,
            self.pic,
            self.unit_torsion,
            self.unit_rank,
            self.places.join(", "),
            d.join(", ")
        )
    }
}

/// A finitely supported integer combination of places, keyed by place name.
/// Zero coefficients are never stored.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Divisor(BTreeMap<String, Int>);

impl Divisor {
    pub fn zero() -> Self {
        Divisor(BTreeMap::new())
    }

    pub fn from_map(map: BTreeMap<String, Int>) -> Self {
        let mut d = Divisor::zero();
        for (p, c) in map {
            d.add_term(&p, &c);
        }
        d
    }

    pub fn coeff(&self, place: &str) -> Int {
        self.0.get(place).cloned().unwrap_or_else(Int::zero)
    }

    pub fn terms(&self) -> &BTreeMap<String, Int> {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn support(&self) -> impl Iterator<Item = &String> {
        self.0.keys()
    }

    pub fn add_term(&mut self, place: &str, c: &Int) {
        let e = self.0.entry(place.to_string()).or_insert_with(Int::zero);
        *e += c;
        if e.is_zero() {
            self.0.remove(place);
        }
    }

    pub fn add(&self, other: &Divisor) -> Divisor {
        let mut d = self.clone();
        for (p, c) in &other.0 {
            d.add_term(p, c);
        }
        d
    }

    pub fn scale(&self, k: &Int) -> Divisor {
        if k.is_zero() {
            return Divisor::zero();
        }
        Divisor(self.0.iter().map(|(p, c)| (p.clone(), c * k)).collect())
    }

    pub fn neg(&self) -> Divisor {
        self.scale(&-Int::one())
    }

    pub fn sub(&self, other: &Divisor) -> Divisor {
        self.add(&other.neg())
    }

    /// Every coefficient is `>= 0`.
    pub fn is_effective(&self) -> bool {
        self.0.values().all(|c| !c.is_negative())
    }
}

impl fmt::Display for Divisor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.0.iter().map(|(p, c)| format!("{c}[{p}]")).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl Serialize for Divisor {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let m: BTreeMap<&String, crate::json::JsonInt> =
            self.0.iter().map(|(p, c)| (p, crate::json::json_int(c))).collect();
        m.serialize(s)
    }
}

/// `Σ coeff_p · class(p)` in `Pic(X)`.
pub fn class_of_divisor(b: &DedekindLogBase, d: &Divisor) -> Result<GroupElement, BaseError> {
    let mut acc = b.pic.zero();
    for (p, c) in &d.0 {
        acc = acc.add(&b.place_class(p)?.scale(c));
    }
    Ok(acc)
}

/// An element of the unit group `Z/w × Z^r`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Unit {
    #[serde(serialize_with = "crate::json::ser_int")]
    torsion: Int,
    #[serde(serialize_with = "crate::json::ser_vec")]
    free: Vec<Int>,
    #[serde(skip)]
    w: Int,
}

impl Unit {
    pub fn new(b: &DedekindLogBase, torsion: Int, free: Vec<Int>) -> Result<Unit, BaseError> {
        if free.len() != b.unit_rank {
            return Err(BaseError::UnitRank {
                expected: b.unit_rank,
                got: free.len(),
            });
        }
        Ok(Unit {
            torsion: torsion.mod_floor(&b.unit_torsion),
            free,
            w: b.unit_torsion.clone(),
        })
    }

    pub fn one(b: &DedekindLogBase) -> Unit {
        Unit {
            torsion: Int::zero(),
            free: vec![Int::zero(); b.unit_rank],
            w: b.unit_torsion.clone(),
        }
    }

    pub fn torsion(&self) -> &Int {
        &self.torsion
    }

    pub fn free(&self) -> &[Int] {
        &self.free
    }

    pub fn is_one(&self) -> bool {
        self.torsion.is_zero() && self.free.iter().all(|x| x.is_zero())
    }

    pub fn mul(&self, other: &Unit) -> Unit {
        Unit {
            torsion: (&self.torsion + &other.torsion).mod_floor(&self.w),
            free: self.free.iter().zip(&other.free).map(|(a, b)| a + b).collect(),
            w: self.w.clone(),
        }
    }

    pub fn pow(&self, k: &Int) -> Unit {
        Unit {
            torsion: (&self.torsion * k).mod_floor(&self.w),
            free: self.free.iter().map(|a| a * k).collect(),
            w: self.w.clone(),
        }
    }

    /// Whether this unit is an `n`-th power of a unit.
    pub fn is_nth_power(&self, n: &Int) -> bool {
        self.torsion.is_multiple_of(&self.w.gcd(n))
            && self.free.iter().all(|a| a.is_multiple_of(n))
    }
}

impl fmt::Display for Unit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "zeta^{}", self.torsion)?;
        for (i, a) in self.free.iter().enumerate() {
            write!(f, " eps{}^{}", i + 1, a)?;
        }
        Ok(())
    }
}

/// An element of `K^*`: a unit times the chosen generator of a principal divisor.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct FactoredK {
    base: String,
    unit: Unit,
    divisor: Divisor,
}

impl FactoredK {
    pub fn unit(&self) -> &Unit {
        &self.unit
    }

    pub fn divisor(&self) -> &Divisor {
        &self.divisor
    }

    /// `v_p(z)`.
    pub fn valuation(&self, place: &str) -> Int {
        self.divisor.coeff(place)
    }

    pub fn base_name(&self) -> &str {
        &self.base
    }
}

impl fmt::Display for FactoredK {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} with div {}", self.unit, self.divisor)
    }
}

pub fn factored_mul(a: &FactoredK, b: &FactoredK) -> Result<FactoredK, BaseError> {
    if a.base != b.base || a.unit.w != b.unit.w || a.unit.free.len() != b.unit.free.len() {
        return Err(BaseError::BaseMismatch);
    }
    Ok(FactoredK {
        base: a.base.clone(),
        unit: a.unit.mul(&b.unit),
        divisor: a.divisor.add(&b.divisor),
    })
}

/// `a^k` for any integer `k`.
pub fn factored_pow(a: &FactoredK, k: &Int) -> FactoredK {
    FactoredK {
        base: a.base.clone(),
        unit: a.unit.pow(k),
        divisor: a.divisor.scale(k),
    }
}

pub fn factored_inv(a: &FactoredK) -> FactoredK {
    factored_pow(a, &-Int::one())
}

/// A divisor with rational coefficients allowed at the points of `D`:
/// an integral part plus fractional parts in `[0, 1)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RatDivisor {
    integer_part: Divisor,
    frac_part: BTreeMap<String, QmodZ>,
}

impl RatDivisor {
    pub fn integral(d: Divisor) -> Self {
        RatDivisor {
            integer_part: d,
            frac_part: BTreeMap::new(),
        }
    }

    /// Builds `Σ (num/den)·[p]`.
    pub fn from_rationals(
        b: &DedekindLogBase,
        terms: &[(&str, Int, Int)],
    ) -> Result<Self, BaseError> {
        let mut e = RatDivisor::integral(Divisor::zero());
        for (p, num, den) in terms {
            if !b.has_place(p) {
                return Err(BaseError::UnknownPlace(p.to_string()));
            }
            assert!(!den.is_zero(), "zero denominator");
            let q = floor_div(num, den);
            let frac = QmodZ::new(num.clone(), den.clone());
            if !frac.is_zero() && !b.in_support(p) {
                return Err(BaseError::FractionOffSupport {
                    place: p.to_string(),
                });
            }
            e = e.add(&RatDivisor::single(p, q, frac));
        }
        Ok(e)
    }

    fn single(p: &str, q: Int, frac: QmodZ) -> Self {
        let mut integer_part = Divisor::zero();
        integer_part.add_term(p, &q);
        let mut frac_part = BTreeMap::new();
        if !frac.is_zero() {
            frac_part.insert(p.to_string(), frac);
        }
        RatDivisor {
            integer_part,
            frac_part,
        }
    }

    /// `(1/n)·d`; fails if a fractional coefficient lands outside `D`.
    pub fn divided(b: &DedekindLogBase, d: &Divisor, n: &Int) -> Result<Self, BaseError> {
        let terms: Vec<(&str, Int, Int)> = d
            .terms()
            .iter()
            .map(|(p, c)| (p.as_str(), c.clone(), n.clone()))
            .collect();
        Self::from_rationals(b, &terms)
    }

    pub fn integer_part(&self) -> &Divisor {
        &self.integer_part
    }

    pub fn frac_part(&self) -> &BTreeMap<String, QmodZ> {
        &self.frac_part
    }

    pub fn add(&self, other: &RatDivisor) -> RatDivisor {
        let mut integer_part = self.integer_part.add(&other.integer_part);
        let mut frac_part = self.frac_part.clone();
        for (p, f) in &other.frac_part {
            let (sum, carry) = add_with_carry(frac_part.get(p), f);
            if carry {
                integer_part.add_term(p, &Int::one());
            }
            if sum.is_zero() {
                frac_part.remove(p);
            } else {
                frac_part.insert(p.clone(), sum);
            }
        }
        RatDivisor {
            integer_part,
            frac_part,
        }
    }
}

fn add_with_carry(a: Option<&QmodZ>, b: &QmodZ) -> (QmodZ, bool) {
    let Some(a) = a else {
        return (b.clone(), false);
    };
    let l = a.denom().lcm(b.denom());
    let s = a.numer() * (&l / a.denom()) + b.numer() * (&l / b.denom());
    let carry = s >= l;
    (QmodZ::new(s, l), carry)
}

/// A class in `H^1_kpl(X, G_m) = DivRat(X, D) / Divp(X)`: fractional parts
/// on every point of `D` and the class in `Pic(X)` of the integral part.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct LogGmClass {
    pub frac: BTreeMap<String, QmodZ>,
    pub pic: GroupElement,
}

impl LogGmClass {
    pub fn zero(b: &DedekindLogBase) -> Self {
        LogGmClass {
            frac: b
                .log_support
                .iter()
                .map(|p| (p.clone(), QmodZ::zero()))
                .collect(),
            pic: b.pic.zero(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.pic.is_zero() && self.frac.values().all(|q| q.is_zero())
    }

    /// The image under `ν`: the fractional parts alone.
    pub fn nu(&self) -> &BTreeMap<String, QmodZ> {
        &self.frac
    }
}

impl fmt::Display for LogGmClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.frac.iter().map(|(p, q)| format!("{p}: {q}")).collect();
        write!(f, "({{{}}}, {})", parts.join(", "), self.pic)
    }
}

pub fn loggm_from_ratdivisor(b: &DedekindLogBase, e: &RatDivisor) -> Result<LogGmClass, BaseError> {
    let mut c = LogGmClass::zero(b);
    for (p, q) in &e.frac_part {
        match c.frac.get_mut(p) {
            Some(slot) => *slot = q.clone(),
            None => {
                return Err(BaseError::FractionOffSupport { place: p.clone() })
            }
        }
    }
    c.pic = class_of_divisor(b, &e.integer_part)?;
    Ok(c)
}

/// Group law: fractional parts add in `Q/Z`, and every carry at `p`
/// contributes `class(p)` to the `Pic` part.
pub fn loggm_add(b: &DedekindLogBase, x: &LogGmClass, y: &LogGmClass) -> LogGmClass {
    let mut pic = x.pic.add(&y.pic);
    let mut frac = BTreeMap::new();
    for (p, qx) in &x.frac {
        let qy = &y.frac[p];
        let (s, carry) = add_with_carry(Some(qx), qy);
        if carry {
            pic = pic.add(b.place_class(p).expect("support point is a place"));
        }
        frac.insert(p.clone(), s);
    }
    LogGmClass { frac, pic }
}

/// `k · x` for any integer `k`, carries included.
pub fn loggm_scale(b: &DedekindLogBase, x: &LogGmClass, k: &Int) -> LogGmClass {
    let mut pic = x.pic.scale(k);
    let mut frac = BTreeMap::new();
    for (p, q) in &x.frac {
        let num = q.numer() * k;
        let carry = floor_div(&num, q.denom());
        pic = pic.add(&b.place_class(p).expect("support point is a place").scale(&carry));
        frac.insert(p.clone(), QmodZ::new(num, q.denom().clone()));
    }
    LogGmClass { frac, pic }
}

pub fn loggm_neg(b: &DedekindLogBase, x: &LogGmClass) -> LogGmClass {
    loggm_scale(b, x, &-Int::one())
}

/// Outcome of the empirical check of `0 -> Pic(X) -> H^1 -> ⊕ (Q/Z)·p -> 0`.
#[derive(Clone, Debug, Serialize)]
pub struct GmAuditReport {
    pub max_denominator: u32,
    pub frac_tuples: usize,
    pub classes: usize,
    pub nu_surjective: bool,
    pub kernel_is_pic: bool,
    pub fibers_have_pic_size: bool,
    pub nu_additive: bool,
    pub violations: Vec<String>,
}

impl GmAuditReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Enumerates fractional tuples on `D` with denominators up to
/// `max_denominator` and every `Pic` class, then checks that `ν` is onto the
/// tuples, that its kernel is exactly the image of `Pic(X)` (injectively),
/// that each fiber has `|Pic|` classes and that `ν` is additive.
pub fn exactness_audit_gm(b: &DedekindLogBase, max_denominator: u32) -> GmAuditReport {
    let mut violations = Vec::new();
    let support: Vec<String> = b.log_support.iter().cloned().collect();
    let values: BTreeSet<QmodZ> = (1..=max_denominator as i64)
        .flat_map(|q| (0..q).map(move |a| QmodZ::from_i64(a, q)))
        .collect();
    let values: Vec<QmodZ> = values.into_iter().collect();
    let mut tuples: Vec<Vec<QmodZ>> = vec![vec![]];
    for _ in &support {
        tuples = tuples
            .into_iter()
            .flat_map(|t| {
                values.iter().map(move |v| {
                    let mut t = t.clone();
                    t.push(v.clone());
                    t
                })
            })
            .collect();
    }

    // integral divisors realizing each Pic class
    let mut reps: BTreeMap<Vec<Int>, Divisor> = BTreeMap::new();
    reps.insert(b.pic.zero().coords().to_vec(), Divisor::zero());
    let mut frontier: Vec<Divisor> = vec![Divisor::zero()];
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for d in frontier {
            for p in &b.places {
                let mut e = d.clone();
                e.add_term(p, &Int::one());
                let c = class_of_divisor(b, &e).unwrap().coords().to_vec();
                if let std::collections::btree_map::Entry::Vacant(slot) = reps.entry(c) {
                    slot.insert(e.clone());
                    next.push(e);
                }
            }
        }
        frontier = next;
    }
    let pic_order = b.pic.order();
    if Int::from(reps.len()) != pic_order {
        violations.push(format!(
            "declared places only generate {} of the {} classes in Pic",
            reps.len(),
            pic_order
        ));
    }

    let mut classes: BTreeSet<(Vec<QmodZ>, Vec<Int>)> = BTreeSet::new();
    let mut nu_surjective = true;
    let mut fibers_ok = true;
    for t in &tuples {
        let terms: Vec<(&str, Int, Int)> = support
            .iter()
            .zip(t)
            .map(|(p, q)| (p.as_str(), q.numer().clone(), q.denom().clone()))
            .collect();
        let frac = RatDivisor::from_rationals(b, &terms).unwrap();
        let mut fiber = BTreeSet::new();
        for d in reps.values() {
            let e = frac.add(&RatDivisor::integral(d.clone()));
            let c = loggm_from_ratdivisor(b, &e).unwrap();
            let nu: Vec<QmodZ> = c.frac.values().cloned().collect();
            if &nu != t {
                nu_surjective = false;
                violations.push(format!("nu of a lift of {t:?} is {nu:?}"));
            }
            fiber.insert(c.pic.coords().to_vec());
            classes.insert((nu, c.pic.coords().to_vec()));
        }
        if Int::from(fiber.len()) != pic_order {
            fibers_ok = false;
            violations.push(format!("fiber over {t:?} has {} classes", fiber.len()));
        }
    }

    let mut kernel_ok = true;
    let mut seen = BTreeSet::new();
    for (c, d) in &reps {
        let x = loggm_from_ratdivisor(b, &RatDivisor::integral(d.clone())).unwrap();
        if x.frac.values().any(|q| !q.is_zero()) || x.pic.coords() != &c[..] {
            kernel_ok = false;
            violations.push(format!("integral divisor {d} does not map into ker nu"));
        }
        if !seen.insert(x.pic.coords().to_vec()) {
            kernel_ok = false;
            violations.push(format!("Pic -> H^1 is not injective at {d}"));
        }
    }

    let mut additive = true;
    let mut sample: Vec<LogGmClass> = Vec::new();
    for t in tuples.iter().take(24) {
        let terms: Vec<(&str, Int, Int)> = support
            .iter()
            .zip(t)
            .map(|(p, q)| (p.as_str(), q.numer().clone(), q.denom().clone()))
            .collect();
        let frac = RatDivisor::from_rationals(b, &terms).unwrap();
        for d in reps.values().take(2) {
            let e = frac.add(&RatDivisor::integral(d.clone()));
            sample.push(loggm_from_ratdivisor(b, &e).unwrap());
        }
    }
    for x in &sample {
        for y in &sample {
            let s = loggm_add(b, x, y);
            for p in &support {
                if s.frac[p] != x.frac[p].add(&y.frac[p]) {
                    additive = false;
                    violations.push(format!("nu({x} + {y}) differs at {p}"));
                }
            }
        }
    }

    GmAuditReport {
        max_denominator,
        frac_tuples: tuples.len(),
        classes: classes.len(),
        nu_surjective,
        kernel_is_pic: kernel_ok,
        fibers_have_pic_size: fibers_ok,
        nu_additive: additive,
        violations,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(a: i64, b: i64) -> QmodZ {
        QmodZ::from_i64(a, b)
    }

    #[test]
    fn validation_collects_errors() {
        let spec = BaseSpec {
            name: "bad".into(),
            pic: vec![Int::from(2)],
            places: vec![
                ("a".into(), vec![Int::from(1), Int::from(0)]),
                ("b".into(), vec![Int::from(1)]),
                ("b".into(), vec![Int::from(0)]),
            ],
            unit_rank: 0,
            unit_torsion: Int::from(0),
            log_support: vec!["c".into()],
        };
        let errs = validate_base(&spec).unwrap_err();
        assert_eq!(errs.len(), 4, "{errs:?}");
        assert!(matches!(errs[0], BaseError::PlaceClass { .. }));
        assert!(validate_base(&BaseSpec {
            pic: vec![Int::from(4), Int::from(6)],
            unit_torsion: Int::one(),
            ..Default::default()
        })
        .is_err());
    }

    #[test]
    fn standard_bases_validate() {
        let z = DedekindLogBase::integers(&[2, 3, 5], &[]);
        assert!(z.pic().is_trivial());
        let k = DedekindLogBase::q_sqrt_minus_5(&["p2"]);
        assert_eq!(k.pic().order(), Int::from(2));
    }

    #[test]
    fn products_and_classes() {
        let z = DedekindLogBase::integers(&[2, 3, 5], &[]);
        let ten = factored_mul(&z.element_from(&[("2", 1)]).unwrap(), &z.element_from(&[("5", 1)]).unwrap())
            .unwrap();
        assert_eq!(ten.divisor(), &z.divisor(&[("2", 1), ("5", 1)]).unwrap());
        let x = z.element_from(&[("3", 2)]).unwrap();
        assert_eq!(factored_mul(&x, &factored_inv(&x)).unwrap(), z.one());

        let k = DedekindLogBase::q_sqrt_minus_5(&[]);
        let a = k.element_from(&[("p2", 1), ("p3", 1)]).unwrap();
        let b = k.element_from(&[("p2", 1), ("p3'", 1)]).unwrap();
        let six = factored_mul(&a, &b).unwrap();
        assert_eq!(six.divisor(), &k.divisor(&[("p2", 2), ("p3", 1), ("p3'", 1)]).unwrap());
        let p2 = k.divisor(&[("p2", 1)]).unwrap();
        assert_eq!(class_of_divisor(&k, &p2).unwrap().coords(), &[Int::one()]);
        assert!(class_of_divisor(&k, &p2.scale(&Int::from(2))).unwrap().is_zero());
        assert!(matches!(
            k.element(Unit::one(&k), p2),
            Err(BaseError::NotPrincipal { .. })
        ));
    }

    #[test]
    fn ratdivisor_to_class() {
        let z = DedekindLogBase::integers(&[2, 3, 5], &[5]);
        let e = RatDivisor::from_rationals(&z, &[("5", Int::from(1), Int::from(2))]).unwrap();
        let c = loggm_from_ratdivisor(&z, &e).unwrap();
        assert_eq!(c.frac["5"], q(1, 2));
        assert!(c.pic.is_zero());
        let e = RatDivisor::from_rationals(&z, &[("5", Int::from(3), Int::from(2))]).unwrap();
        assert_eq!(e.integer_part().coeff("5"), Int::one());
        assert_eq!(loggm_from_ratdivisor(&z, &e).unwrap(), c);
        assert!(RatDivisor::from_rationals(&z, &[("3", Int::from(1), Int::from(2))]).is_err());
        let c2 = loggm_add(&z, &c, &c);
        assert!(c2.is_zero());
    }

    #[test]
    fn carry_lands_on_nontrivial_class() {
        let k = DedekindLogBase::q_sqrt_minus_5(&["p2"]);
        let e = RatDivisor::from_rationals(&k, &[("p2", Int::from(1), Int::from(2))]).unwrap();
        let x = loggm_from_ratdivisor(&k, &e).unwrap();
        let s = loggm_add(&k, &x, &x);
        assert!(s.frac["p2"].is_zero());
        assert_eq!(s.pic.coords(), &[Int::one()]);
        assert_eq!(loggm_scale(&k, &x, &Int::from(2)), s);
        assert!(loggm_add(&k, &x, &loggm_neg(&k, &x)).is_zero());
        assert_eq!(loggm_add(&k, &x, &LogGmClass::zero(&k)), x);
    }

    #[test]
    fn principal_lattice() {
        let k = DedekindLogBase::q_sqrt_minus_5(&[]);
        let places: Vec<String> = ["p2", "p3"].iter().map(|s| s.to_string()).collect();
        let l = k.principal_lattice(&places).unwrap();
        // p2 + p3, 2·p3 span the kernel of (1, 1) mod 2
        assert_eq!(l, vec![vec![Int::one(), Int::one()], vec![Int::zero(), Int::from(2)]]);
    }

    #[test]
    fn audits() {
        let z = DedekindLogBase::integers(&[2, 3, 5], &[5]);
        let r = exactness_audit_gm(&z, 4);
        assert!(r.passed(), "{:?}", r.violations);
        let trivial_d = DedekindLogBase::integers(&[2, 3, 5], &[]);
        let r = exactness_audit_gm(&trivial_d, 4);
        assert!(r.passed());
        assert_eq!((r.frac_tuples, r.classes), (1, 1));
        let k = DedekindLogBase::q_sqrt_minus_5(&["p2"]);
        let r = exactness_audit_gm(&k, 3);
        assert!(r.passed(), "{:?}", r.violations);
        assert_eq!(r.classes, 2 * r.frac_tuples);
    }
}
