//! `mu_n`-torsors over a Dedekind log base.
//!
//! A class in `H^1_kpl(X, mu_n)` is represented by a Kummer element `z ∈ K^*`
//! whose valuations are divisible by `n` away from the log support. Two
//! representatives give the same class when their quotient is an `n`-th power
//! in `K^*`, which in the unit × principal-divisor model means: the unit part
//! is an `n`-th power of a unit and the divisor is `n` times a principal one.
//!
//! Sign conventions: `rho(T)` is the class of `(1/n)·div(z)`, and the `Pic`
//! part of `rho(T)` is `-c(z)`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::dedekind::{
    class_of_divisor, factored_mul, factored_pow, loggm_add, loggm_from_ratdivisor,
    loggm_scale, DedekindLogBase, Divisor, FactoredK, LogGmClass, RatDivisor, Unit,
};
use crate::error::MunError;
use crate::lattice::{floor_div, solve_in_row_lattice};
use crate::{GroupElement, Int, QmodZ};

fn check_modulus(n: &Int) -> Result<(), MunError> {
    if n < &Int::one() {
        return Err(MunError::BadModulus(n.to_string()));
    }
    Ok(())
}

#[derive(Clone, Debug)]
pub struct MunTorsorClass {
    base: DedekindLogBase,
    n: Int,
    rep: FactoredK,
}

/// Checks membership (`v_p(z) ≡ 0 mod n` for every `p` outside `D`) and wraps
/// `z` as a torsor class.
pub fn torsor_from_element(
    b: &DedekindLogBase,
    n: &Int,
    z: &FactoredK,
) -> Result<MunTorsorClass, MunError> {
    check_modulus(n)?;
    b.check_divisor(z.divisor())?;
    for (p, v) in z.divisor().terms() {
        if !b.in_support(p) && !v.is_multiple_of(n) {
            return Err(MunError::Membership {
                place: p.clone(),
                valuation: v.to_string(),
                n: n.to_string(),
            });
        }
    }
    Ok(MunTorsorClass {
        base: b.clone(),
        n: n.clone(),
        rep: z.clone(),
    })
}

impl MunTorsorClass {
    pub fn base(&self) -> &DedekindLogBase {
        &self.base
    }

    pub fn n(&self) -> &Int {
        &self.n
    }

    pub fn representative(&self) -> &FactoredK {
        &self.rep
    }

    /// Whether the class is trivial, i.e. `z` is an `n`-th power in `K^*`.
    pub fn is_trivial(&self) -> bool {
        is_nth_power(&self.base, &self.n, &self.rep)
    }

    /// Product of classes (product of representatives).
    pub fn mul(&self, other: &MunTorsorClass) -> Result<MunTorsorClass, MunError> {
        if self.n != other.n || self.base != other.base {
            return Err(MunError::Mismatch);
        }
        let z = factored_mul(&self.rep, &other.rep)?;
        Ok(MunTorsorClass {
            base: self.base.clone(),
            n: self.n.clone(),
            rep: z,
        })
    }
}

impl PartialEq for MunTorsorClass {
    fn eq(&self, other: &Self) -> bool {
        if self.n != other.n || self.base != other.base {
            return false;
        }
        let q = factored_mul(&self.rep, &factored_pow(&other.rep, &-Int::one()))
            .expect("same base");
        is_nth_power(&self.base, &self.n, &q)
    }
}

impl Eq for MunTorsorClass {}

impl fmt::Display for MunTorsorClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}] in H^1(mu_{})", self.rep, self.n)
    }
}

fn is_nth_power(b: &DedekindLogBase, n: &Int, z: &FactoredK) -> bool {
    if !z.unit().is_nth_power(n) {
        return false;
    }
    let mut root = Divisor::zero();
    for (p, v) in z.divisor().terms() {
        if !v.is_multiple_of(n) {
            return false;
        }
        root.add_term(p, &(v / n));
    }
    class_of_divisor(b, &root).expect("places checked").is_zero()
}

/// `rho(T)`: the class of `(1/n)·div(z)` in `H^1_kpl(X, G_m)`.
pub fn rho(t: &MunTorsorClass) -> LogGmClass {
    let e = RatDivisor::divided(&t.base, t.rep.divisor(), &t.n).expect("membership checked");
    loggm_from_ratdivisor(&t.base, &e).expect("places checked")
}

/// `nu_n(T)_p = (v_p(z) mod n)/n` for `p` in `D`.
pub fn nu(t: &MunTorsorClass) -> BTreeMap<String, QmodZ> {
    t.base
        .log_support()
        .iter()
        .map(|p| (p.clone(), QmodZ::new(t.rep.valuation(p), t.n.clone())))
        .collect()
}

pub fn is_fppf(t: &MunTorsorClass) -> bool {
    nu(t).values().all(|q| q.is_zero())
}

/// `n / gcd(n, v_p(z))`, the order of `v_p(z)/n` in `Q/Z`.
pub fn ramification_index(t: &MunTorsorClass, place: &str) -> Result<Int, MunError> {
    if !t.base.has_place(place) {
        return Err(crate::BaseError::UnknownPlace(place.to_string()).into());
    }
    Ok(&t.n / t.n.gcd(&t.rep.valuation(place)))
}

/// `c(z) = -Σ q_p(z)·[p]` where `v_p(z) = n·q_p(z) + r_p(z)`, `0 <= r_p < n`.
pub fn c_of(t: &MunTorsorClass) -> GroupElement {
    let mut q = Divisor::zero();
    for (p, v) in t.rep.divisor().terms() {
        q.add_term(p, &floor_div(v, &t.n));
    }
    class_of_divisor(&t.base, &q).expect("places checked").neg()
}

/// Classical and logarithmic Galois structure invariants of a torsor.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GaloisStructure {
    /// `(0, c, 2c, …, (n-1)c)` in `Pic(X)^n`.
    pub cl_tuple: Vec<GroupElement>,
    /// `(0, rho, 2 rho, …, (n-1) rho)` in `H^1_kpl(X, G_m)^n`.
    pub pilog_tuple: Vec<LogGmClass>,
}

fn modulus_len(n: &Int) -> usize {
    n.to_string().parse().expect("modulus fits in memory")
}

pub fn cl_of(t: &MunTorsorClass) -> Vec<GroupElement> {
    let c = c_of(t);
    let mut out = vec![t.base.pic().zero()];
    for _ in 1..modulus_len(&t.n) {
        let next = out.last().unwrap().add(&c);
        out.push(next);
    }
    out
}

pub fn pilog_of(t: &MunTorsorClass) -> Vec<LogGmClass> {
    let r = rho(t);
    let mut out = vec![LogGmClass::zero(&t.base)];
    for _ in 1..modulus_len(&t.n) {
        let next = loggm_add(&t.base, out.last().unwrap(), &r);
        out.push(next);
    }
    out
}

pub fn galois_structure(t: &MunTorsorClass) -> GaloisStructure {
    GaloisStructure {
        cl_tuple: cl_of(t),
        pilog_tuple: pilog_of(t),
    }
}

/// The class of a unit (the map `d` of the Kummer sequence).
pub fn unit_to_torsor(b: &DedekindLogBase, n: &Int, u: &Unit) -> Result<MunTorsorClass, MunError> {
    let z = b.element(u.clone(), Divisor::zero())?;
    torsor_from_element(b, n, &z)
}

/// `theta_n`: `(k_p/n)_p ↦ Σ k_p·[p]` in `Pic(X)/n`.
pub fn theta(
    b: &DedekindLogBase,
    n: &Int,
    frac: &BTreeMap<String, QmodZ>,
) -> Result<GroupElement, MunError> {
    check_modulus(n)?;
    let quotient = b.pic().mod_multiples(n);
    let mut acc = b.pic().zero();
    for (p, q) in frac {
        if !b.in_support(p) {
            return Err(crate::BaseError::FractionOffSupport { place: p.clone() }.into());
        }
        if !n.is_multiple_of(q.denom()) {
            return Err(MunError::BadDenominator {
                place: p.clone(),
                value: q.to_string(),
                n: n.to_string(),
            });
        }
        let k = q.numer() * (n / q.denom());
        acc = acc.add(&b.place_class(p)?.scale(&k));
    }
    Ok(quotient.apply(&acc))
}

/// A pair `(I, z)` standing for the line bundle `O(I)` with `phi` given by
/// `z`; the branch divisor is `Δ = div(z) + n·I`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RacElement {
    #[serde(serialize_with = "crate::json::ser_int")]
    n: Int,
    ideal: Divisor,
    z: FactoredK,
    branch: Divisor,
}

pub fn rac_make(
    b: &DedekindLogBase,
    n: &Int,
    ideal: Divisor,
    z: FactoredK,
) -> Result<RacElement, MunError> {
    check_modulus(n)?;
    b.check_divisor(&ideal)?;
    b.check_divisor(z.divisor())?;
    let branch = z.divisor().add(&ideal.scale(n));
    let negative: Vec<String> = branch
        .terms()
        .iter()
        .filter(|(_, c)| c.is_negative())
        .map(|(p, _)| p.clone())
        .collect();
    let off_support: Vec<String> = branch
        .support()
        .filter(|p| !b.in_support(p))
        .cloned()
        .collect();
    if !negative.is_empty() || !off_support.is_empty() {
        return Err(MunError::BranchDivisor {
            negative,
            off_support,
        });
    }
    Ok(RacElement {
        n: n.clone(),
        ideal,
        z,
        branch,
    })
}

impl RacElement {
    pub fn neutral(b: &DedekindLogBase, n: &Int) -> RacElement {
        RacElement {
            n: n.clone(),
            ideal: Divisor::zero(),
            z: b.one(),
            branch: Divisor::zero(),
        }
    }

    pub fn n(&self) -> &Int {
        &self.n
    }

    pub fn ideal(&self) -> &Divisor {
        &self.ideal
    }

    pub fn z(&self) -> &FactoredK {
        &self.z
    }

    /// `Δ = div(z) + n·I`.
    pub fn branch_divisor(&self) -> &Divisor {
        &self.branch
    }
}

impl fmt::Display for RacElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(I = {}, z = {}, branch {})", self.ideal, self.z, self.branch)
    }
}

pub fn rac_mul(x: &RacElement, y: &RacElement) -> Result<RacElement, MunError> {
    if x.n != y.n {
        return Err(MunError::Mismatch);
    }
    Ok(RacElement {
        n: x.n.clone(),
        ideal: x.ideal.add(&y.ideal),
        z: factored_mul(&x.z, &y.z)?,
        branch: x.branch.add(&y.branch),
    })
}

/// Isomorphism of pairs: some `h` with `div(h) = I1 - I2` and
/// `z2 · z1^{-1} · h^{-n}` an `n`-th power of a unit. Since `h` is only
/// defined up to a unit, this holds iff `I1 - I2` is principal, the branch
/// divisors agree and the unit parts of `z1`, `z2` agree modulo `n`-th powers.
pub fn rac_eq(b: &DedekindLogBase, x: &RacElement, y: &RacElement) -> Result<bool, MunError> {
    if x.n != y.n {
        return Err(MunError::Mismatch);
    }
    let diff = x.ideal.sub(&y.ideal);
    if !class_of_divisor(b, &diff)?.is_zero() || x.branch != y.branch {
        return Ok(false);
    }
    let u = y.z.unit().mul(&x.z.unit().pow(&-Int::one()));
    Ok(u.is_nth_power(&x.n))
}

/// The map onto `H^1_kpl(X, mu_n)`: the class of `z`.
pub fn rac_to_torsor(b: &DedekindLogBase, r: &RacElement) -> Result<MunTorsorClass, MunError> {
    torsor_from_element(b, &r.n, &r.z)
}

/// The forgetful map to `H^1_kpl(X, G_m)`: the class of `-I + (1/n)·Δ`.
pub fn rac_forget(b: &DedekindLogBase, r: &RacElement) -> Result<LogGmClass, MunError> {
    let e = RatDivisor::divided(b, &r.branch, &r.n)?
        .add(&RatDivisor::integral(r.ideal.neg()));
    Ok(loggm_from_ratdivisor(b, &e)?)
}

/// The pair `(0, u)` of a unit.
pub fn rac_of_unit(b: &DedekindLogBase, n: &Int, u: &Unit) -> Result<RacElement, MunError> {
    rac_make(b, n, Divisor::zero(), b.element(u.clone(), Divisor::zero())?)
}

/// Every invariant of a torsor class, each tagged with the formula used.
#[derive(Clone, Debug, Serialize)]
pub struct TorsorReport {
    pub element: FactoredK,
    #[serde(serialize_with = "crate::json::ser_int")]
    pub n: Int,
    pub trivial: Invariant<bool>,
    pub rho: Invariant<LogGmClass>,
    pub nu: Invariant<BTreeMap<String, QmodZ>>,
    pub fppf: Invariant<bool>,
    pub c: Invariant<GroupElement>,
    pub cl: Invariant<Vec<GroupElement>>,
    pub pilog: Invariant<Vec<LogGmClass>>,
    pub ramification: Invariant<BTreeMap<String, crate::json::JsonInt>>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Invariant<T> {
    pub value: T,
    pub formula: &'static str,
}

fn inv<T>(value: T, formula: &'static str) -> Invariant<T> {
    Invariant { value, formula }
}

/// Ramification indices are reported at every place of `D` and at `places`.
pub fn torsor_report(t: &MunTorsorClass, places: &[String]) -> Result<TorsorReport, MunError> {
    let mut ram = BTreeMap::new();
    for p in t.base.log_support().iter().chain(places) {
        ram.insert(p.clone(), crate::json::json_int(&ramification_index(t, p)?));
    }
    Ok(TorsorReport {
        element: t.rep.clone(),
        n: t.n.clone(),
        trivial: inv(t.is_trivial(), "z in (K^*)^n"),
        rho: inv(rho(t), "class of (1/n) div(z)"),
        nu: inv(nu(t), "(v_p(z) mod n)/n for p in D"),
        fppf: inv(is_fppf(t), "nu = 0"),
        c: inv(c_of(t), "-sum floor(v_p(z)/n) [p]"),
        cl: inv(cl_of(t), "(k c(z)) for 0 <= k < n"),
        pilog: inv(pilog_of(t), "(k rho) for 0 <= k < n"),
        ramification: inv(ram, "n / gcd(n, v_p(z))"),
    })
}

/// Outcome of the enumeration audit of the Kummer sequences.
#[derive(Clone, Debug, Default, Serialize)]
pub struct MunAuditReport {
    #[serde(serialize_with = "crate::json::ser_int")]
    pub n: Int,
    pub support: Vec<String>,
    /// Size of `K^*_S / (K^*_S)^n`.
    pub group_size: usize,
    /// Those elements satisfying membership, i.e. classes in `H^1_kpl(X, mu_n)`.
    pub classes: usize,
    pub fppf_classes: usize,
    pub rho_n_torsion: bool,
    pub ker_rho_is_units: bool,
    pub ker_nu_is_fppf: bool,
    pub image_nu_in_ker_theta: bool,
    pub ker_theta_in_image_nu: bool,
    pub violations: Vec<String>,
}

impl MunAuditReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

fn odometer(bounds: &[Int]) -> Vec<Vec<Int>> {
    let mut out = vec![vec![]];
    for b in bounds {
        let mut next = Vec::new();
        for v in &out {
            let mut k = Int::zero();
            while &k < b {
                let mut w = v.clone();
                w.push(k.clone());
                next.push(w);
                k += 1;
            }
        }
        out = next;
    }
    out
}

/// Enumerates `K^*_S / (K^*_S)^n` for `S = sample ∪ D` and checks, on the
/// classes satisfying membership, that `ker rho` is the image of the units,
/// that `ker nu_n` is the set of fppf classes and that `im nu_n = ker theta_n`.
pub fn audit_mun_sequence(
    b: &DedekindLogBase,
    n: &Int,
    sample: &[String],
) -> Result<MunAuditReport, MunError> {
    check_modulus(n)?;
    let mut support: BTreeSet<String> = sample.iter().cloned().collect();
    support.extend(b.log_support().iter().cloned());
    for p in &support {
        if !b.has_place(p) {
            return Err(crate::BaseError::UnknownPlace(p.clone()).into());
        }
    }
    let support: Vec<String> = support.into_iter().collect();
    let lattice = b.principal_lattice(&support)?;
    let g = b.unit_torsion().gcd(n);
    let mut bounds = vec![g.clone()];
    bounds.extend(std::iter::repeat_n(n.clone(), b.unit_rank() + lattice.len()));
    let reps = odometer(&bounds);

    let mut report = MunAuditReport {
        n: n.clone(),
        support: support.clone(),
        group_size: reps.len(),
        rho_n_torsion: true,
        ker_rho_is_units: true,
        ker_nu_is_fppf: true,
        image_nu_in_ker_theta: true,
        ker_theta_in_image_nu: true,
        ..Default::default()
    };
    let key = |z: &FactoredK| -> Vec<Int> {
        let mut k = vec![z.unit().torsion().mod_floor(&g)];
        k.extend(z.unit().free().iter().map(|a| a.mod_floor(n)));
        let d: Vec<Int> = support.iter().map(|p| z.valuation(p)).collect();
        let c = solve_in_row_lattice(&lattice, &d).expect("divisor is principal on S");
        k.extend(c.iter().map(|a| a.mod_floor(n)));
        k
    };

    let r = b.unit_rank();
    let mut ker_rho = BTreeSet::new();
    let mut ker_nu = BTreeSet::new();
    let mut fppf = BTreeSet::new();
    let mut image_nu: BTreeSet<Vec<QmodZ>> = BTreeSet::new();
    let mut units = BTreeSet::new();
    for e in &reps {
        let unit = Unit::new(b, e[0].clone(), e[1..=r].to_vec())?;
        let mut d = Divisor::zero();
        for (c, row) in e[r + 1..].iter().zip(&lattice) {
            for (p, x) in support.iter().zip(row) {
                d.add_term(p, &(c * x));
            }
        }
        let z = b.element(unit.clone(), d)?;
        if d_is_unit(&z) {
            units.insert(key(&unit_to_torsor(b, n, &unit)?.rep));
        }
        let Ok(t) = torsor_from_element(b, n, &z) else {
            continue;
        };
        report.classes += 1;
        let k = key(&z);
        let rh = rho(&t);
        if !loggm_scale(b, &rh, n).is_zero() {
            report.rho_n_torsion = false;
            report.violations.push(format!("n * rho({z}) != 0"));
        }
        if rh.is_zero() {
            ker_rho.insert(k.clone());
        }
        let v = nu(&t);
        if v.values().all(|q| q.is_zero()) {
            ker_nu.insert(k.clone());
        }
        if z.divisor().terms().values().all(|x| x.is_multiple_of(n)) {
            fppf.insert(k.clone());
        }
        if !theta(b, n, &v)?.is_zero() {
            report.image_nu_in_ker_theta = false;
            report
                .violations
                .push(format!("theta(nu({z})) != 0"));
        }
        image_nu.insert(v.into_values().collect());
    }
    report.fppf_classes = fppf.len();
    if ker_rho != units {
        report.ker_rho_is_units = false;
        report.violations.push(format!(
            "ker rho has {} classes, the units give {}",
            ker_rho.len(),
            units.len()
        ));
    }
    if ker_nu != fppf {
        report.ker_nu_is_fppf = false;
        report.violations.push(format!(
            "ker nu has {} classes, {} are fppf",
            ker_nu.len(),
            fppf.len()
        ));
    }
    let d: Vec<String> = b.log_support().iter().cloned().collect();
    for f in odometer(&vec![n.clone(); d.len()]) {
        let frac: BTreeMap<String, QmodZ> = d
            .iter()
            .zip(&f)
            .map(|(p, k)| (p.clone(), QmodZ::new(k.clone(), n.clone())))
            .collect();
        if theta(b, n, &frac)?.is_zero() && !image_nu.contains(&frac.values().cloned().collect::<Vec<_>>()) {
            report.ker_theta_in_image_nu = false;
            report
                .violations
                .push(format!("{frac:?} is in ker theta but not hit by the sample"));
        }
    }
    Ok(report)
}

fn d_is_unit(z: &FactoredK) -> bool {
    z.divisor().is_zero()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn n(k: i64) -> Int {
        Int::from(k)
    }

    fn q(a: i64, b: i64) -> QmodZ {
        QmodZ::from_i64(a, b)
    }

    fn zbase(d: &[u64]) -> DedekindLogBase {
        DedekindLogBase::integers(&[2, 3, 5, 7], d)
    }

    #[test]
    fn membership() {
        let b = zbase(&[5]);
        let five = b.element_from(&[("5", 1)]).unwrap();
        assert!(torsor_from_element(&b, &n(2), &five).is_ok());
        let b0 = zbase(&[]);
        match torsor_from_element(&b0, &n(2), &five) {
            Err(MunError::Membership { place, .. }) => assert_eq!(place, "5"),
            other => panic!("{other:?}"),
        }
        let t = torsor_from_element(&b0, &n(3), &b0.element_from(&[("7", 3)]).unwrap()).unwrap();
        assert!(t.is_trivial());
        assert!(torsor_from_element(&b, &n(0), &five).is_err());
    }

    #[test]
    fn rho_nu_and_ramification() {
        let b = zbase(&[5]);
        let t = torsor_from_element(&b, &n(2), &b.element_from(&[("5", 1)]).unwrap()).unwrap();
        let r = rho(&t);
        assert_eq!(r.frac["5"], q(1, 2));
        assert!(r.pic.is_zero());
        assert_eq!(nu(&t)["5"], q(1, 2));
        assert!(!is_fppf(&t));
        assert_eq!(ramification_index(&t, "5").unwrap(), n(2));
        assert_eq!(ramification_index(&t, "3").unwrap(), n(1));
        assert!(ramification_index(&t, "11").is_err());

        let b = zbase(&[2, 5]);
        let fifty = b.element_from(&[("2", 1), ("5", 2)]).unwrap();
        let t = torsor_from_element(&b, &n(3), &fifty).unwrap();
        assert_eq!(nu(&t)["2"], q(1, 3));
        assert_eq!(nu(&t)["5"], q(2, 3));

        let four = b.element_from(&[("2", 2)]).unwrap();
        assert!(is_fppf(&torsor_from_element(&b, &n(2), &four).unwrap()));
        let t = torsor_from_element(&b, &n(6), &four).unwrap();
        assert_eq!(ramification_index(&t, "2").unwrap(), n(3));
    }

    #[test]
    fn dvr() {
        let b = DedekindLogBase::dvr();
        let z = b.element_from(&[("s", 3)]).unwrap();
        let t = torsor_from_element(&b, &n(2), &z).unwrap();
        assert_eq!(rho(&t).frac["s"], q(1, 2));
        assert_eq!(ramification_index(&t, "s").unwrap(), n(2));
    }

    #[test]
    fn units() {
        let b = zbase(&[]);
        let minus_one = b.unit(1, &[]).unwrap();
        let t = unit_to_torsor(&b, &n(2), &minus_one).unwrap();
        assert!(!t.is_trivial());
        assert!(rho(&t).is_zero());
        assert!(is_fppf(&t));
        assert!(unit_to_torsor(&b, &n(3), &minus_one).unwrap().is_trivial());
        assert!(unit_to_torsor(&b, &n(2), &Unit::one(&b)).unwrap().is_trivial());
    }

    #[test]
    fn number_ring_invariants() {
        let b = DedekindLogBase::q_sqrt_minus_5(&[]);
        let two = b.element_from(&[("p2", 2)]).unwrap();
        let t = torsor_from_element(&b, &n(2), &two).unwrap();
        let p2 = b.place_class("p2").unwrap().clone();
        assert_eq!(c_of(&t), p2);
        assert_eq!(cl_of(&t), vec![b.pic().zero(), p2.clone()]);
        assert!(is_fppf(&t));
        assert!(nu(&t).is_empty());
        assert_eq!(rho(&t).pic, p2.neg());
        // 2 is not a square: the class is nontrivial although fppf
        assert!(!t.is_trivial());

        let b = DedekindLogBase::q_sqrt_minus_5(&["p2", "p3"]);
        let z = b.element_from(&[("p2", 1), ("p3", 1)]).unwrap();
        let t = torsor_from_element(&b, &n(2), &z).unwrap();
        assert!(c_of(&t).is_zero());
    }

    #[test]
    fn cl_is_not_additive() {
        let b = DedekindLogBase::q_sqrt_minus_5(&["p2", "p3", "p3'"]);
        let z = b.element_from(&[("p2", 1), ("p3", 1)]).unwrap();
        let w = b.element_from(&[("p2", 1), ("p3'", 1)]).unwrap();
        let tz = torsor_from_element(&b, &n(2), &z).unwrap();
        let tw = torsor_from_element(&b, &n(2), &w).unwrap();
        let tzw = tz.mul(&tw).unwrap();
        let sum: Vec<GroupElement> = cl_of(&tz)
            .iter()
            .zip(cl_of(&tw))
            .map(|(a, b)| a.add(&b))
            .collect();
        assert_ne!(cl_of(&tzw), sum);
        assert_eq!(c_of(&tzw), b.place_class("p2").unwrap().neg());
    }

    #[test]
    fn c_differs_from_ideal_class() {
        // z = 2, I = 0: c(z) = [p2] while [I] = 0
        let b = DedekindLogBase::q_sqrt_minus_5(&["p2"]);
        let r = rac_make(&b, &n(2), Divisor::zero(), b.element_from(&[("p2", 2)]).unwrap()).unwrap();
        let t = rac_to_torsor(&b, &r).unwrap();
        assert!(!c_of(&t).is_zero());
        assert!(class_of_divisor(&b, r.ideal()).unwrap().is_zero());
    }

    #[test]
    fn pilog_tuple() {
        let b = zbase(&[5]);
        let t = torsor_from_element(&b, &n(2), &b.element_from(&[("5", 1)]).unwrap()).unwrap();
        let p = pilog_of(&t);
        assert!(p[0].is_zero());
        assert_eq!(p[1].frac["5"], q(1, 2));
    }

    #[test]
    fn theta_values() {
        let b = DedekindLogBase::q_sqrt_minus_5(&["p2"]);
        let f: BTreeMap<String, QmodZ> = [("p2".to_string(), q(1, 2))].into();
        assert!(!theta(&b, &n(2), &f).unwrap().is_zero());
        assert!(theta(&b, &n(2), &BTreeMap::new()).unwrap().is_zero());
        let f3: BTreeMap<String, QmodZ> = [("p2".to_string(), q(1, 3))].into();
        assert!(matches!(theta(&b, &n(2), &f3), Err(MunError::BadDenominator { .. })));
        let z = zbase(&[5]);
        let f: BTreeMap<String, QmodZ> = [("5".to_string(), q(1, 2))].into();
        assert!(theta(&z, &n(2), &f).unwrap().is_zero());
    }

    #[test]
    fn rac_group() {
        let b = DedekindLogBase::q_sqrt_minus_5(&["p2"]);
        let e = RacElement::neutral(&b, &n(2));
        let x = rac_make(&b, &n(2), Divisor::zero(), b.element_from(&[("p2", 2)]).unwrap()).unwrap();
        assert!(rac_eq(&b, &rac_mul(&x, &e).unwrap(), &x).unwrap());
        assert!(rac_to_torsor(&b, &e).unwrap().is_trivial());

        // I = -div(h), z = h^n is isomorphic to the neutral pair
        let h = b.element_from(&[("p3", 1), ("p3'", 1)]).unwrap();
        let y = rac_make(&b, &n(2), h.divisor().neg(), factored_pow(&h, &n(2))).unwrap();
        assert!(rac_eq(&b, &y, &e).unwrap());

        let bad = rac_make(&b, &n(2), Divisor::zero(), b.element_from(&[("p3", 1), ("p3'", 1)]).unwrap());
        match bad {
            Err(MunError::BranchDivisor { off_support, .. }) => {
                assert_eq!(off_support, vec!["p3".to_string(), "p3'".to_string()])
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn kernel_witness() {
        // (I = [p2], z = 1): branch 2[p2], nontrivial pair, trivial torsor
        let b = DedekindLogBase::q_sqrt_minus_5(&["p2"]);
        let w = rac_make(&b, &n(2), b.divisor(&[("p2", 1)]).unwrap(), b.one()).unwrap();
        assert!(!rac_eq(&b, &w, &RacElement::neutral(&b, &n(2))).unwrap());
        assert!(rac_to_torsor(&b, &w).unwrap().is_trivial());
        assert_eq!(rac_forget(&b, &w).unwrap(), LogGmClass::zero(&b));
    }

    #[test]
    fn audits() {
        let b = DedekindLogBase::integers(&[2, 3, 5], &[5]);
        let s: Vec<String> = ["2", "3", "5"].iter().map(|s| s.to_string()).collect();
        for k in 2..=4 {
            let r = audit_mun_sequence(&b, &n(k), &s).unwrap();
            assert!(r.passed(), "{:?}", r.violations);
        }
        let b = DedekindLogBase::q_sqrt_minus_5(&["p2"]);
        let s: Vec<String> = ["p2", "p3", "p3'"].iter().map(|s| s.to_string()).collect();
        let r = audit_mun_sequence(&b, &n(2), &s).unwrap();
        assert!(r.passed(), "{:?}", r.violations);
    }
}
