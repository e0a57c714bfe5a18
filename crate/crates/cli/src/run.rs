use std::collections::BTreeMap;
use std::path::PathBuf;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand};
use logflat::dedekind::{exactness_audit_gm, loggm_scale, DedekindLogBase, Divisor, Unit};
use logflat::kummer_torsor::build_standard_torsor;
use logflat::monodromy::{pair, predict_fppf, predict_ramification, DivisionProblem};
use logflat::monoid::{
    check_integral_bounded, integrality_certificate_free_base, is_kummer_by_definition,
    kummer_report, MonoidMorphism,
};
use logflat::mun::{
    audit_mun_sequence, is_fppf, pilog_of, rac_eq, rac_forget, rac_make, rac_mul, rac_to_torsor,
    ramification_index, rho, torsor_from_element, torsor_report, RacElement,
};
use logflat::{Int, MunError};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::config::{parse_config, parse_divisor, parse_element, parse_group_element, ConfigDocument};
use crate::report::Report;

#[derive(Parser, Debug)]
#[command(name = "logflat", version, about = "Kummer log flat torsor calculator")]
pub struct Cli {
    /// Configuration file; relative paths are also looked up in $LOGFLAT_CONFIG_DIR.
    #[arg(short, long, global = true)]
    pub config: Option<PathBuf>,
    /// Print a JSON report instead of text.
    #[arg(long, global = true)]
    pub json: bool,
    /// Seed for randomized checks.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Parse and validate the configuration.
    Validate,
    /// Monoid and morphism checks.
    #[command(subcommand)]
    Monoid(MonoidCommand),
    /// Invariants of the mu_n-torsor defined by an element.
    Torsor {
        /// An element name from the config, or a product like `2^3*5`.
        #[arg(long, allow_hyphen_values = true)]
        element: String,
        /// The modulus n >= 1
        #[arg(long)]
        n: u64,
        /// Extra places at which to report the ramification index.
        #[arg(long)]
        place: Vec<String>,
    },
    /// Pairs (I, z) with branch divisor in the log support.
    Rac {
        /// The modulus n >= 1
        #[arg(long)]
        n: u64,
        /// `IDEAL:ELEMENT`, e.g. `p2:1` or `0:two`; repeatable.
        #[arg(long = "pair", required = true)]
        pairs: Vec<String>,
    },
    /// fppf and ramification predictions from the pairing table.
    Monodromy {
        /// Element of phi, as comma-separated coordinates.
        #[arg(long)]
        x: String,
        /// Element of phi', as comma-separated coordinates.
        #[arg(long)]
        y: String,
        /// Generators of the image of G in phi; defaults to x.
        #[arg(long)]
        g: Vec<String>,
    },
    /// Exactness audits of the Kummer sequences on finite enumerations.
    Audit {
        /// The modulus n >= 1
        #[arg(long)]
        n: u64,
        /// Comma-separated places spanning the enumerated group; defaults to all places.
        #[arg(long)]
        sample: Option<String>,
        /// Largest denominator enumerated in H^1(G_m).
        #[arg(long, default_value_t = 4)]
        max_den: u32,
        /// Number of random torsor classes checked for the tuple laws.
        #[arg(long, default_value_t = 50)]
        random: usize,
    },
}

#[derive(Subcommand, Debug)]
pub enum MonoidCommand {
    /// Kummer, exactness and integrality verdicts plus the torsor group.
    Check {
        /// Morphism name; all morphisms when omitted.
        #[arg(long)]
        morphism: Option<String>,
        /// Generator count bound for the integrality search.
        #[arg(long, default_value_t = 3)]
        bound: usize,
    },
}

pub fn run(cli: &Cli) -> Result<Report> {
    let path = cli
        .config
        .as_ref()
        .ok_or_else(|| anyhow!("no configuration given (use --config)"))?;
    let doc = parse_config(path)?;
    match &cli.command {
        Command::Validate => Ok(validate(&doc)),
        Command::Monoid(MonoidCommand::Check { morphism, bound }) => {
            monoid_check(&doc, morphism.as_deref(), *bound)
        }
        Command::Torsor { element, n, place } => torsor(&doc, element, *n, place),
        Command::Rac { n, pairs } => rac(&doc, *n, pairs),
        Command::Monodromy { x, y, g } => monodromy(&doc, x, y, g),
        Command::Audit {
            n,
            sample,
            max_den,
            random,
        } => audit(&doc, *n, sample.as_deref(), *max_den, *random, cli.seed),
    }
}

fn base(doc: &ConfigDocument) -> Result<&DedekindLogBase> {
    doc.base
        .as_ref()
        .ok_or_else(|| anyhow!("the configuration has no [base] section"))
}

fn modulus(n: u64) -> Result<Int> {
    if n == 0 {
        bail!("n must be at least 1");
    }
    Ok(Int::from(n))
}

fn validate(doc: &ConfigDocument) -> Report {
    let morphisms: Vec<&String> = doc.morphisms.iter().map(|(n, _)| n).collect();
    let mut r = Report::new(
        "configuration is valid",
        json!({
            "valid": true,
            "base": doc.base,
            "elements": doc.elements,
            "monoids": doc.monoids,
            "morphisms": morphisms,
            "pairing": doc.pairing,
        }),
    );
    if let Some(b) = &doc.base {
        r.line("base", b);
    }
    r.line("elements", doc.elements.len())
        .line("monoids", doc.monoids.len())
        .line("morphisms", doc.morphisms.len())
        .line("pairing", if doc.pairing.is_some() { "yes" } else { "no" });
    r
}

fn monoid_check(doc: &ConfigDocument, name: Option<&str>, bound: usize) -> Result<Report> {
    let selected: Vec<&(String, MonoidMorphism)> = match name {
        Some(n) => vec![doc
            .morphisms
            .iter()
            .find(|(m, _)| m == n)
            .ok_or_else(|| anyhow!("no morphism named {n:?}"))?],
        None => doc.morphisms.iter().collect(),
    };
    let mut entries = Vec::new();
    let mut lines = Vec::new();
    let mut rejected = false;
    for (m, u) in selected {
        let report = kummer_report(u)?;
        let by_definition = is_kummer_by_definition(u)?;
        let free_source = u.source().generators().len() == u.source().gp_rank();
        let (integral, integral_line) = if free_source && report.verdict.is_verified() {
            let cert = integrality_certificate_free_base(u)?;
            let line = format!("certificate n = {}", cert.n);
            (json!({ "method": "certificate", "certificate": cert }), line)
        } else {
            let verdict = check_integral_bounded(u, bound)?;
            let line = format!("{verdict} (bounded search)");
            (json!({ "method": "bounded search", "bound": bound, "verdict": verdict }), line)
        };
        let torsor = build_standard_torsor(u).ok();
        lines.push((m.clone(), u.to_string()));
        lines.push((format!("{m} exact"), report.exact.to_string()));
        lines.push((
            format!("{m} coker(u^gp)"),
            format!("{} + Z^{}", report.cokernel_torsion, report.cokernel_free_rank),
        ));
        lines.push((
            format!("{m} kummer"),
            match report.failed_criterion() {
                None => "yes".to_string(),
                Some(why) => format!("no: {why}"),
            },
        ));
        lines.push((format!("{m} integral"), integral_line));
        if let Some(t) = &torsor {
            lines.push((format!("{m} torsor"), t.to_string()));
        }
        rejected |= report.verdict.is_refuted();
        entries.push(json!({
            "name": m,
            "morphism": u,
            "kummer": report,
            "kummer_by_definition": by_definition,
            "integral": integral,
            "torsor": torsor,
        }));
    }
    let saturation: BTreeMap<&String, Value> = doc
        .monoids
        .iter()
        .map(|(n, m)| (n, json!({ "saturated": m.is_saturated(), "gp_rank": m.gp_rank() })))
        .collect();
    for (n, m) in &doc.monoids {
        lines.push((format!("monoid {n} saturated"), m.is_saturated().to_string()));
    }
    let mut r = Report::new(
        "monoid check",
        json!({ "morphisms": entries, "monoids": saturation }),
    );
    r.lines = lines;
    Ok(if rejected { r.reject() } else { r })
}

fn torsor(doc: &ConfigDocument, element: &str, n: u64, places: &[String]) -> Result<Report> {
    let b = base(doc)?;
    let n = modulus(n)?;
    let z = parse_element(doc, b, element)?;
    for p in places {
        if !b.has_place(p) {
            bail!("unknown place {p:?}");
        }
    }
    let t = match torsor_from_element(b, &n, &z) {
        Ok(t) => t,
        Err(e @ MunError::Membership { .. }) => {
            let mut r = Report::new(
                format!("{element} does not define a mu_{n}-torsor"),
                json!({ "membership": false, "error": e.to_string() }),
            );
            r.line("reason", &e);
            return Ok(r.reject());
        }
        Err(e) => return Err(e.into()),
    };
    let report = torsor_report(&t, places)?;
    let mut r = Report::new(
        format!("mu_{n}-torsor of {z}"),
        json!({ "membership": true, "report": report }),
    );
    let nu: Vec<String> = report.nu.value.iter().map(|(p, q)| format!("{p}: {q}")).collect();
    let cl: Vec<String> = report.cl.value.iter().map(|c| c.to_string()).collect();
    let pilog: Vec<String> = report.pilog.value.iter().map(|c| c.to_string()).collect();
    let ram: Vec<String> = report
        .ramification
        .value
        .keys()
        .map(|p| format!("{p}: {}", ramification_index(&t, p).expect("place checked")))
        .collect();
    r.line("trivial", report.trivial.value)
        .line("rho", &report.rho.value)
        .line("nu", format!("{{{}}}", nu.join(", ")))
        .line("fppf", report.fppf.value)
        .line("c", &report.c.value)
        .line("cl", format!("({})", cl.join(", ")))
        .line("pi^log", format!("({})", pilog.join(", ")))
        .line("ramification", format!("{{{}}}", ram.join(", ")));
    Ok(r)
}

fn parse_pair(doc: &ConfigDocument, b: &DedekindLogBase, n: &Int, text: &str) -> Result<std::result::Result<RacElement, MunError>> {
    let (ideal, element) = text
        .split_once(':')
        .ok_or_else(|| anyhow!("pair {text:?} is not of the form IDEAL:ELEMENT"))?;
    let ideal = parse_divisor(b, ideal)?;
    let z = parse_element(doc, b, element)?;
    Ok(rac_make(b, n, ideal, z))
}

fn rac(doc: &ConfigDocument, n: u64, pairs: &[String]) -> Result<Report> {
    let b = base(doc)?;
    let n = modulus(n)?;
    let neutral = RacElement::neutral(b, &n);
    let mut elements = Vec::new();
    let mut entries = Vec::new();
    let mut lines = Vec::new();
    for text in pairs {
        let x = match parse_pair(doc, b, &n, text)? {
            Ok(x) => x,
            Err(e) => {
                let mut r = Report::new(
                    format!("{text} is not a valid pair"),
                    json!({ "pair": text, "valid": false, "error": e.to_string() }),
                );
                r.line("reason", &e);
                return Ok(r.reject());
            }
        };
        let is_neutral = rac_eq(b, &x, &neutral)?;
        let torsor = rac_to_torsor(b, &x)?;
        let trivial = torsor.is_trivial();
        let forget = rac_forget(b, &x)?;
        lines.push((text.clone(), x.to_string()));
        lines.push((format!("{text} neutral"), is_neutral.to_string()));
        lines.push((format!("{text} torsor trivial"), trivial.to_string()));
        lines.push((format!("{text} forgetful class"), forget.to_string()));
        if !is_neutral && trivial {
            lines.push((format!("{text} kernel witness"), "nontrivial pair with trivial torsor".into()));
        }
        entries.push(json!({
            "pair": text,
            "valid": true,
            "element": x,
            "neutral": is_neutral,
            "torsor_trivial": trivial,
            "in_kernel_nontrivially": !is_neutral && trivial,
            "forgetful_class": forget,
        }));
        elements.push(x);
    }
    let mut summary = json!({ "n": n.to_string(), "pairs": entries });
    if elements.len() >= 2 {
        let mut product = elements[0].clone();
        for x in &elements[1..] {
            product = rac_mul(&product, x)?;
        }
        let equal = rac_eq(b, &elements[0], &elements[1])?;
        lines.push(("product".into(), product.to_string()));
        lines.push(("first two isomorphic".into(), equal.to_string()));
        summary["product"] = serde_json::to_value(&product)?;
        summary["first_two_equal"] = json!(equal);
    }
    let mut r = Report::new(format!("Rac pairs for n = {n}"), summary);
    r.lines = lines;
    Ok(r)
}

fn monodromy(doc: &ConfigDocument, x: &str, y: &str, g: &[String]) -> Result<Report> {
    let d = doc
        .pairing
        .as_ref()
        .ok_or_else(|| anyhow!("the configuration has no [pairing] section"))?;
    let xe = parse_group_element(d.phi(), x).context("--x")?;
    let ye = parse_group_element(d.phi_prime(), y).context("--y")?;
    let gens = if g.is_empty() {
        vec![xe.clone()]
    } else {
        g.iter()
            .map(|s| parse_group_element(d.phi(), s).context("--g"))
            .collect::<Result<_>>()?
    };
    let value = pair(d, &xe, &ye)?;
    let index = predict_ramification(d, &xe, &ye)?;
    let fppf = predict_fppf(&DivisionProblem::new(d.clone(), gens, ye.clone())?);
    let mut r = Report::new(
        "monodromy prediction",
        json!({
            "x": xe,
            "y": ye,
            "pairing": value,
            "fppf": fppf,
            "ramification_index": index.to_string(),
        }),
    );
    r.line("pairing (x, y)", &value)
        .line("fppf", fppf)
        .line("ramification index", &index);
    Ok(r)
}

fn random_class(
    rng: &mut ChaCha8Rng,
    b: &DedekindLogBase,
    n: &Int,
) -> Result<logflat::mun::MunTorsorClass> {
    for _ in 0..1000 {
        let mut d = Divisor::zero();
        for p in b.places() {
            let k = Int::from(rng.gen_range(-6..=6i64));
            d.add_term(p, &if b.in_support(p) { k } else { k * n });
        }
        if let Ok(z) = b.element(Unit::one(b), d) {
            return Ok(torsor_from_element(b, n, &z)?);
        }
    }
    Ok(torsor_from_element(b, n, &b.one())?)
}

fn audit(
    doc: &ConfigDocument,
    n: u64,
    sample: Option<&str>,
    max_den: u32,
    random: usize,
    seed: u64,
) -> Result<Report> {
    let b = base(doc)?;
    let n = modulus(n)?;
    let sample: Vec<String> = match sample {
        Some(s) => s.split(',').map(|p| p.trim().to_string()).collect(),
        None => b.places().to_vec(),
    };
    let gm = exactness_audit_gm(b, max_den);
    let mun = audit_mun_sequence(b, &n, &sample)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut random_violations = Vec::new();
    for _ in 0..random {
        let t = random_class(&mut rng, b, &n)?;
        let r = rho(&t);
        if !loggm_scale(b, &r, &n).is_zero() {
            random_violations.push(format!("n * rho != 0 for {t}"));
        }
        for (k, e) in pilog_of(&t).iter().enumerate() {
            if *e != loggm_scale(b, &r, &Int::from(k)) {
                random_violations.push(format!("pi^log entry {k} of {t}"));
            }
        }
        let unramified = b
            .log_support()
            .iter()
            .all(|p| ramification_index(&t, p).map(|e| e == Int::from(1)).unwrap_or(false));
        if is_fppf(&t) != unramified {
            random_violations.push(format!("fppf and ramification disagree for {t}"));
        }
    }
    let passed = gm.passed() && mun.passed() && random_violations.is_empty();
    let mut r = Report::new(
        format!("sequence audits for n = {n}"),
        json!({
            "passed": passed,
            "seed": seed,
            "gm": gm,
            "mun": mun,
            "random_classes": random,
            "random_violations": random_violations,
        }),
    );
    r.line("H^1(G_m) classes", format!("{} over {} fractional tuples", gm.classes, gm.frac_tuples))
        .line("H^1(G_m) exactness", if gm.passed() { "ok".to_string() } else { gm.violations.join("; ") })
        .line("mu_n classes", format!("{} of {} ({} fppf)", mun.classes, mun.group_size, mun.fppf_classes))
        .line("ker rho = units", mun.ker_rho_is_units)
        .line("ker nu = fppf", mun.ker_nu_is_fppf)
        .line("im nu = ker theta", mun.image_nu_in_ker_theta && mun.ker_theta_in_image_nu)
        .line("random classes", format!("{random} (seed {seed}), {} violations", random_violations.len()));
    for v in &mun.violations {
        r.line("violation", v);
    }
    Ok(if passed { r } else { r.reject() })
}
