//! Command-line front end: classification, transformation, verification,
//! integration, the independence probe, and parameter conversion, with a
//! stable JSON output mode for scripting.
//!
//! Exit codes: 0 for definite verdicts (including `exists = no`), 2 for
//! usage errors, 3 for computational errors (singularities, unsupported
//! parameter fields). `PAINLEVE_LOG={error,info,debug}` controls logging on
//! standard error.

use std::io::Write;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use painleve::algebra::{rat, Context, Derivation, RationalFunction, VarKind};
use painleve::backlund::{
    self, orbit_word_search, translation_coset_equal, verify_solution_preservation, WeylWord,
};
use painleve::classify::{
    self, boalch_coset, genericity_report, strongly_minimal_pvi, BoalchCoset, Minimality,
};
use painleve::error::Error;
use painleve::numeric::{
    backlund_numeric_check, detect_relations, integrate, integrate_at, monomial_basis,
};
use painleve::systems::{
    build_equation, invert_pvi, lift_to_hamiltonian, reduce_to_second_order,
    residual_second_order, residual_system, Equation, FamilyId, ParamTuple,
};

#[derive(Parser)]
#[command(
    name = "painleve",
    version,
    about = "Exact and numerical toolkit for the Painlevé families"
)]
struct Cli {
    /// Emit exactly one JSON object on standard output.
    #[arg(long, global = true)]
    json: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Default)]
struct ParamFlags {
    /// Family: pi, pii, piii-prime, piv, pv, pvi, sii, siii-prime, svi.
    #[arg(long)]
    family: Option<String>,
    /// Exact literal: "p/q" or a generic symbol g1..g9.
    #[arg(long, allow_hyphen_values = true)]
    alpha: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    beta: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    gamma: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    delta: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    v1: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    v2: Option<String>,
    /// 4-tuple (alpha0, alpha1, alpha3, alpha4); alpha2 is recomputed.
    #[arg(long, allow_hyphen_values = true)]
    alphabar: Option<String>,
    /// Full 5-tuple (alpha0..alpha4); the affine constraint is validated.
    #[arg(long, allow_hyphen_values = true)]
    a5: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Decide existence/count of algebraic solutions at exact parameters.
    Classify {
        #[command(flatten)]
        params: ParamFlags,
    },
    /// Test the strong-minimality hyperplane condition for S_VI.
    Minimal {
        #[command(flatten)]
        params: ParamFlags,
    },
    /// Apply a Bäcklund word to parameters (and optionally a solution).
    Transform {
        #[command(flatten)]
        params: ParamFlags,
        /// Word such as "s0 s2 (s1 s3 s4 s2)^2"; rightmost acts first.
        #[arg(long)]
        word: String,
        #[arg(long, allow_hyphen_values = true)]
        solution: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        xsolution: Option<String>,
    },
    /// Compare parameter tuples up to the translation sublattice and search
    /// for a connecting generator word.
    Orbit {
        #[command(flatten)]
        params: ParamFlags,
        /// Target 4-tuple a,b,c,d.
        #[arg(long, allow_hyphen_values = true)]
        target: String,
        /// Breadth-first search depth.
        #[arg(long, default_value_t = 8)]
        depth: usize,
    },
    /// Check a claimed solution symbolically, or the solution-preservation
    /// identities of the generators in a word.
    Verify {
        #[command(flatten)]
        params: ParamFlags,
        #[arg(long, allow_hyphen_values = true)]
        solution: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        xsolution: Option<String>,
        #[arg(long)]
        word: Option<String>,
    },
    /// Integrate numerically and export the trajectory.
    Integrate {
        #[command(flatten)]
        params: ParamFlags,
        #[arg(long, allow_hyphen_values = true)]
        from: f64,
        #[arg(long, allow_hyphen_values = true)]
        to: f64,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        /// Initial y.
        #[arg(long, allow_hyphen_values = true)]
        y0: f64,
        /// Initial second state component (y' or x).
        #[arg(long, allow_hyphen_values = true)]
        x0: f64,
        /// Write CSV here (plus a .json sidecar next to it).
        #[arg(long)]
        csv: Option<String>,
        /// Check a Bäcklund word pointwise on the computed trajectory
        /// (svi only) and report the max residual.
        #[arg(long)]
        word: Option<String>,
    },
    /// Numerically probe algebraic independence of sampled solutions.
    Probe {
        #[command(flatten)]
        params: ParamFlags,
        /// Number of integrated solutions.
        #[arg(long, default_value_t = 2)]
        count: usize,
        /// Monomial total-degree bound.
        #[arg(long, default_value_t = 2)]
        degree: u32,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
        from: f64,
        #[arg(long, default_value_t = 3.0, allow_hyphen_values = true)]
        to: f64,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        /// Closed-form column sampled exactly alongside the integrations.
        #[arg(long, allow_hyphen_values = true)]
        solution: Option<String>,
    },
    /// Convert between parameter coordinate systems.
    Convert {
        #[command(flatten)]
        params: ParamFlags,
        /// P_VI-form 4-tuple to invert: alpha,beta,gamma,delta.
        #[arg(long, allow_hyphen_values = true)]
        pvi: Option<String>,
        /// Watanabe 4-tuple a1,a2,a3,a4.
        #[arg(long, allow_hyphen_values = true)]
        watanabe: Option<String>,
    },
}

fn main() {
    let cli = Cli::parse();
    log_init();
    match run(&cli) {
        Ok(()) => {}
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(if e.is_usage() { 2 } else { 3 });
        }
    }
}

// ---------------------------------------------------------------------------
// logging

static LOG_LEVEL: std::sync::OnceLock<u8> = std::sync::OnceLock::new();

fn log_init() {
    let level = match std::env::var("PAINLEVE_LOG").as_deref() {
        Ok("debug") => 2,
        Ok("info") => 1,
        _ => 0,
    };
    let _ = LOG_LEVEL.set(level);
}

fn log_info(msg: impl AsRef<str>) {
    if *LOG_LEVEL.get().unwrap_or(&0) >= 1 {
        eprintln!("[info] {}", msg.as_ref());
    }
}

fn log_debug(msg: impl AsRef<str>) {
    if *LOG_LEVEL.get().unwrap_or(&0) >= 2 {
        eprintln!("[debug] {}", msg.as_ref());
    }
}

// ---------------------------------------------------------------------------
// literals and contexts

/// Scans flag values for generic symbols g1..g9.
fn collect_symbols(texts: &[&Option<String>]) -> Vec<String> {
    let mut syms = Vec::new();
    for t in texts.iter().filter_map(|o| o.as_ref()) {
        let bytes = t.as_bytes();
        let mut i = 0;
        while i < bytes.len() {
            if bytes[i].is_ascii_alphabetic() || bytes[i] == b'_' {
                let start = i;
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                let word = &t[start..i];
                if word.len() == 2
                    && word.starts_with('g')
                    && word.as_bytes()[1].is_ascii_digit()
                    && word.as_bytes()[1] != b'0'
                    && !syms.contains(&word.to_string())
                {
                    syms.push(word.to_string());
                }
            } else {
                i += 1;
            }
        }
    }
    syms.sort();
    syms
}

struct Session {
    ctx: Arc<Context>,
    symbols: Vec<String>,
}

impl Session {
    fn new(flags: &ParamFlags, extra: &[&Option<String>]) -> Session {
        let mut texts: Vec<&Option<String>> = vec![
            &flags.alpha,
            &flags.beta,
            &flags.gamma,
            &flags.delta,
            &flags.v1,
            &flags.v2,
            &flags.alphabar,
            &flags.a5,
        ];
        texts.extend_from_slice(extra);
        let symbols = collect_symbols(&texts);
        let decls: Vec<(&str, VarKind)> = symbols
            .iter()
            .map(|s| (s.as_str(), VarKind::Transcendental))
            .collect();
        Session {
            ctx: Context::standard(&decls),
            symbols,
        }
    }

    fn exact(&self, text: &str) -> Result<RationalFunction, Error> {
        let s = text.trim();
        if self.symbols.iter().any(|g| g == s) {
            return Ok(RationalFunction::named(&self.ctx, s));
        }
        rat::parse(s)
            .map(|r| RationalFunction::constant(&self.ctx, r))
            .ok_or_else(|| {
                Error::Usage(format!("`{s}` is not an exact literal (use p/q or g1..g9)"))
            })
    }

    fn exact_flag(&self, flag: &Option<String>, name: &str) -> Result<RationalFunction, Error> {
        let text = flag
            .as_ref()
            .ok_or_else(|| Error::Usage(format!("missing --{name}")))?;
        self.exact(text)
    }

    fn tuple4(&self, text: &str, name: &str) -> Result<[RationalFunction; 4], Error> {
        let parts: Vec<&str> = text.split(',').collect();
        if parts.len() != 4 {
            return Err(Error::Usage(format!(
                "--{name} needs 4 comma-separated values"
            )));
        }
        Ok([
            self.exact(parts[0])?,
            self.exact(parts[1])?,
            self.exact(parts[2])?,
            self.exact(parts[3])?,
        ])
    }

    fn tuple5(&self, text: &str) -> Result<[RationalFunction; 5], Error> {
        let parts: Vec<&str> = text.split(',').collect();
        if parts.len() != 5 {
            return Err(Error::Usage("--a5 needs 5 comma-separated values".into()));
        }
        Ok([
            self.exact(parts[0])?,
            self.exact(parts[1])?,
            self.exact(parts[2])?,
            self.exact(parts[3])?,
            self.exact(parts[4])?,
        ])
    }

    /// The S_VI tuple from --a5 (validated) or --alphabar (α₂ recomputed).
    fn svi_tuple(&self, flags: &ParamFlags) -> Result<ParamTuple, Error> {
        if let Some(a5) = &flags.a5 {
            return ParamTuple::from_a5(self.tuple5(a5)?);
        }
        if let Some(bar) = &flags.alphabar {
            return Ok(ParamTuple::from_a4(self.tuple4(bar, "alphabar")?));
        }
        Err(Error::Usage("svi parameters need --alphabar or --a5".into()))
    }

    fn solution(&self, text: &str) -> Result<RationalFunction, Error> {
        let d = Derivation::new(&self.ctx);
        painleve::parser::parse_expr(text, &self.ctx, &d)
    }
}

/// CLI family names; `piii-prime` is the second-order reduction of S_III′.
#[derive(Clone, Copy, PartialEq)]
enum CliFamily {
    Lib(FamilyId),
    PiiiPrime,
}

fn parse_family(flags: &ParamFlags) -> Result<CliFamily, Error> {
    let name = flags
        .family
        .as_ref()
        .ok_or_else(|| Error::Usage("missing --family".into()))?;
    match name.as_str() {
        "piii-prime" => Ok(CliFamily::PiiiPrime),
        other => FamilyId::parse(other)
            .filter(|f| *f != FamilyId::PIII)
            .map(CliFamily::Lib)
            .ok_or_else(|| Error::Usage(format!("unknown family `{other}`"))),
    }
}

/// Collects the family's parameter values from the flags.
fn family_params(
    session: &Session,
    flags: &ParamFlags,
    fam: CliFamily,
) -> Result<Vec<RationalFunction>, Error> {
    match fam {
        CliFamily::Lib(FamilyId::PI) => Ok(vec![]),
        CliFamily::Lib(FamilyId::PII) | CliFamily::Lib(FamilyId::SII) => {
            Ok(vec![session.exact_flag(&flags.alpha, "alpha")?])
        }
        CliFamily::Lib(FamilyId::PIV) => Ok(vec![
            session.exact_flag(&flags.alpha, "alpha")?,
            session.exact_flag(&flags.beta, "beta")?,
        ]),
        CliFamily::Lib(FamilyId::PV) | CliFamily::Lib(FamilyId::PVI) => Ok(vec![
            session.exact_flag(&flags.alpha, "alpha")?,
            session.exact_flag(&flags.beta, "beta")?,
            session.exact_flag(&flags.gamma, "gamma")?,
            session.exact_flag(&flags.delta, "delta")?,
        ]),
        CliFamily::Lib(FamilyId::SIIIp) | CliFamily::PiiiPrime => Ok(vec![
            session.exact_flag(&flags.v1, "v1")?,
            session.exact_flag(&flags.v2, "v2")?,
        ]),
        CliFamily::Lib(FamilyId::SVI) => Ok(session.svi_tuple(flags)?.a5().to_vec()),
        CliFamily::Lib(FamilyId::PIII) => Err(Error::Usage("use piii-prime or siii-prime".into())),
    }
}

/// Builds the equation for a CLI family (piii-prime reduces S_III′).
fn build_cli_equation(
    session: &Session,
    flags: &ParamFlags,
    fam: CliFamily,
) -> Result<Equation, Error> {
    let params = family_params(session, flags, fam)?;
    match fam {
        CliFamily::PiiiPrime => {
            let eq = build_equation(FamilyId::SIIIp, &session.ctx, &params)?;
            let reduced = reduce_to_second_order(eq.hamiltonian().unwrap())?;
            Ok(Equation::SecondOrder(reduced))
        }
        CliFamily::Lib(f) => build_equation(f, &session.ctx, &params),
    }
}

fn emit(json_mode: bool, value: serde_json::Value, text: impl FnOnce()) {
    if json_mode {
        println!(
            "{}",
            serde_json::to_string_pretty(&value).expect("serializable")
        );
    } else {
        text();
    }
}

fn run(cli: &Cli) -> Result<(), Error> {
    match &cli.command {
        Command::Classify { params } => cmd_classify(cli.json, params),
        Command::Minimal { params } => cmd_minimal(cli.json, params),
        Command::Transform {
            params,
            word,
            solution,
            xsolution,
        } => cmd_transform(cli.json, params, word, solution, xsolution),
        Command::Orbit {
            params,
            target,
            depth,
        } => cmd_orbit(cli.json, params, target, *depth),
        Command::Verify {
            params,
            solution,
            xsolution,
            word,
        } => cmd_verify(cli.json, params, solution, xsolution, word),
        Command::Integrate {
            params,
            from,
            to,
            tol,
            y0,
            x0,
            csv,
            word,
        } => cmd_integrate(cli.json, params, *from, *to, *tol, *y0, *x0, csv, word),
        Command::Probe {
            params,
            count,
            degree,
            seed,
            from,
            to,
            tol,
            solution,
        } => cmd_probe(
            cli.json, params, *count, *degree, *seed, *from, *to, *tol, solution,
        ),
        Command::Convert {
            params,
            pvi,
            watanabe,
        } => cmd_convert(cli.json, params, pvi, watanabe),
    }
}

fn cmd_classify(json_mode: bool, flags: &ParamFlags) -> Result<(), Error> {
    let session = Session::new(flags, &[]);
    let fam = parse_family(flags)?;
    log_info(format!(
        "classifying family {}",
        flags.family.as_deref().unwrap_or("?")
    ));

    let (verdict, generic) = match fam {
        CliFamily::Lib(FamilyId::PII) | CliFamily::Lib(FamilyId::SII) => {
            let p = family_params(&session, flags, fam)?;
            (
                classify::classify_pii(&p[0]),
                genericity_report(FamilyId::PII, &p),
            )
        }
        CliFamily::Lib(FamilyId::SIIIp) | CliFamily::PiiiPrime => {
            let p = family_params(&session, flags, fam)?;
            (
                classify::classify_siiip(&p[0], &p[1]),
                genericity_report(FamilyId::SIIIp, &p),
            )
        }
        CliFamily::Lib(FamilyId::PIV) => {
            let p = family_params(&session, flags, fam)?;
            (
                classify::classify_piv(&p[0], &p[1]),
                genericity_report(FamilyId::PIV, &p),
            )
        }
        CliFamily::Lib(FamilyId::PV) => {
            let p = family_params(&session, flags, fam)?;
            (
                classify::classify_pv(&p[0], &p[1], &p[2], &p[3])?,
                genericity_report(FamilyId::PV, &p),
            )
        }
        CliFamily::Lib(FamilyId::SVI) => {
            let tuple = session.svi_tuple(flags)?;
            let a4 = tuple.a4();
            (
                classify::classify_svi(&a4),
                genericity_report(FamilyId::SVI, &a4),
            )
        }
        CliFamily::Lib(FamilyId::PVI) => {
            if flags.alphabar.is_some() || flags.a5.is_some() {
                let tuple = session.svi_tuple(flags)?;
                let a4 = tuple.a4();
                (
                    classify::classify_svi(&a4),
                    genericity_report(FamilyId::PVI, &a4),
                )
            } else {
                let p = family_params(&session, flags, fam)?;
                let generic = genericity_report(FamilyId::PVI, &p);
                let verdict = classify_pvi_from_pvi_params(&p)?;
                (verdict, generic)
            }
        }
        CliFamily::Lib(FamilyId::PI) => {
            return Err(Error::Usage(
                "no parameter classification applies to pi".into(),
            ));
        }
        CliFamily::Lib(FamilyId::PIII) => unreachable!("rejected by parse_family"),
    };

    let mut value = serde_json::to_value(&verdict).expect("serializable");
    value["genericity"] = serde_json::to_value(&generic).expect("serializable");
    value["symbols"] = json!(session.symbols);
    emit(json_mode, value, || {
        println!(
            "family {}: exists = {}, count = {}, condition = {}",
            verdict.family,
            to_kebab(&verdict.exists),
            to_kebab(&verdict.count),
            verdict.condition
        );
        for (k, v) in &verdict.witnesses {
            println!("  witness {k} = {v}");
        }
        for n in &verdict.notes {
            println!("  note: {n}");
        }
    });
    Ok(())
}

/// Classification of P_VI given P_VI-form parameters: generic symbols give
/// the generic verdict; otherwise every exact preimage tuple is examined.
fn classify_pvi_from_pvi_params(
    p: &[RationalFunction],
) -> Result<classify::ClassificationVerdict, Error> {
    if classify::params_structurally_generic(p) {
        // Independent pvi parameters force independent alpha-bar values.
        let mut v = classify::classify_svi(&[
            p[0].clone(),
            p[1].clone(),
            p[2].clone(),
            p[3].clone(),
        ]);
        v.family = FamilyId::PVI;
        v.condition = "PVI-generic".into();
        return Ok(v);
    }
    let tuples = invert_pvi(&[p[0].clone(), p[1].clone(), p[2].clone(), p[3].clone()])?;
    let mut best: Option<classify::ClassificationVerdict> = None;
    let mut notes = Vec::new();
    for tuple in &tuples {
        let a4 = tuple.a4();
        let v = classify::classify_svi(&a4);
        notes.push(format!(
            "alpha-bar ({}, {}, {}, {}): {}",
            a4[0], a4[1], a4[2], a4[3], v.condition
        ));
        let better = matches!(v.exists, classify::Exists::Yes)
            && !matches!(best.as_ref().map(|b| b.exists), Some(classify::Exists::Yes));
        if best.is_none() || better {
            best = Some(v);
        }
    }
    let mut v = best.expect("invert_pvi returns at least one tuple");
    v.family = FamilyId::PVI;
    v.notes.extend(notes);
    Ok(v)
}

fn cmd_minimal(json_mode: bool, flags: &ParamFlags) -> Result<(), Error> {
    let session = Session::new(flags, &[]);
    let tuple = session.svi_tuple(flags)?;
    let a4 = tuple.a4();
    let m = strongly_minimal_pvi(&a4);
    let coset = boalch_coset(&a4);
    let value = json!({
        "family": "svi",
        "alphabar": a4.iter().map(|v| v.to_string()).collect::<Vec<_>>(),
        "minimality": serde_json::to_value(&m).expect("serializable"),
        "boalch_coset": serde_json::to_value(&coset).expect("serializable"),
        "symbols": session.symbols,
    });
    emit(json_mode, value, || match &m {
        Minimality::StronglyMinimal => {
            println!("strongly-minimal");
            if coset == BoalchCoset::Member {
                println!("boalch-coset member: exactly 12 algebraic solutions");
            }
        }
        Minimality::ConditionFails { witness } => {
            println!("condition-fails({witness})");
        }
    });
    Ok(())
}

fn cmd_transform(
    json_mode: bool,
    flags: &ParamFlags,
    word_text: &str,
    solution: &Option<String>,
    xsolution: &Option<String>,
) -> Result<(), Error> {
    let session = Session::new(flags, &[solution, xsolution]);
    let tuple = session.svi_tuple(flags)?;
    let word: WeylWord = word_text.parse()?;
    log_debug(format!("word expands to {word}"));

    let sol = match (solution, xsolution) {
        (Some(y), Some(x)) => Some((session.solution(y)?, session.solution(x)?)),
        (Some(y), None) => {
            let y = session.solution(y)?;
            let sys = painleve::systems::build_svi(&session.ctx, &tuple);
            let x = lift_to_hamiltonian(&sys, &y)?;
            Some((y, x))
        }
        (None, Some(_)) => {
            return Err(Error::Usage("--xsolution needs --solution".into()));
        }
        (None, None) => None,
    };

    let (out, out_sol) = backlund::apply_word(&word, &tuple, sol.as_ref().map(|(y, x)| (y, x)))?;
    let a4 = out.a4();
    let value = json!({
        "word": word.to_string(),
        "a5": out.a5().iter().map(|v| v.to_string()).collect::<Vec<_>>(),
        "alphabar": a4.iter().map(|v| v.to_string()).collect::<Vec<_>>(),
        "pvi": out.pvi().iter().map(|v| v.to_string()).collect::<Vec<_>>(),
        "solution": out_sol.as_ref().map(|(y, _)| y.to_string()),
        "xsolution": out_sol.as_ref().map(|(_, x)| x.to_string()),
        "symbols": session.symbols,
    });
    emit(json_mode, value, || {
        println!("alphabar: {}, {}, {}, {}", a4[0], a4[1], a4[2], a4[3]);
        if let Some((y, x)) = &out_sol {
            println!("solution: y = {y}");
            println!("          x = {x}");
        }
    });
    Ok(())
}

fn cmd_orbit(json_mode: bool, flags: &ParamFlags, target: &str, depth: usize) -> Result<(), Error> {
    let session = Session::new(flags, &[&Some(target.to_string())]);
    let tuple = session.svi_tuple(flags)?;
    let a4 = tuple.a4();
    let b4 = session.tuple4(target, "target")?;

    let coset = translation_coset_equal(&a4, &b4);
    // The word search needs purely rational tuples.
    let word = {
        let to_rat = |v: &RationalFunction| v.as_rational();
        let p: Option<Vec<_>> = a4.iter().map(to_rat).collect();
        let q: Option<Vec<_>> = b4.iter().map(to_rat).collect();
        match (p, q) {
            (Some(p), Some(q)) => orbit_word_search(
                &[p[0].clone(), p[1].clone(), p[2].clone(), p[3].clone()],
                &[q[0].clone(), q[1].clone(), q[2].clone(), q[3].clone()],
                depth,
            ),
            _ => None,
        }
    };

    let value = json!({
        "translation_coset_equal": coset,
        "word": word.as_ref().map(|w| w.to_string()),
        "depth": depth,
        "symbols": session.symbols,
    });
    emit(json_mode, value, || {
        println!("translation-coset-equal: {coset}");
        match &word {
            Some(w) => println!("word (depth <= {depth}): {w}"),
            None => println!("no word found at depth <= {depth}"),
        }
    });
    Ok(())
}

fn cmd_verify(
    json_mode: bool,
    flags: &ParamFlags,
    solution: &Option<String>,
    xsolution: &Option<String>,
    word: &Option<String>,
) -> Result<(), Error> {
    let session = Session::new(flags, &[solution, xsolution]);

    if let Some(sol_text) = solution {
        let fam = parse_family(flags)?;
        let eq = build_cli_equation(&session, flags, fam)?;
        let y = session.solution(sol_text)?;
        match &eq {
            Equation::SecondOrder(e) => {
                let r = residual_second_order(e, &y)?;
                let value = json!({
                    "family": e.family.as_str(),
                    "residual": r.to_string(),
                    "solves": r.is_zero(),
                    "symbols": session.symbols,
                });
                emit(json_mode, value, || println!("residual {r}"));
            }
            Equation::Hamiltonian(sys) => {
                let x = match xsolution {
                    Some(xt) => session.solution(xt)?,
                    None => lift_to_hamiltonian(sys, &y)?,
                };
                let (r1, r2) = residual_system(sys, &y, &x)?;
                let value = json!({
                    "family": sys.family.as_str(),
                    "xsolution": x.to_string(),
                    "residual": [r1.to_string(), r2.to_string()],
                    "solves": r1.is_zero() && r2.is_zero(),
                    "symbols": session.symbols,
                });
                emit(json_mode, value, || {
                    println!("x = {x}");
                    println!("residual ({r1}, {r2})");
                });
            }
        }
        return Ok(());
    }

    if let Some(word_text) = word {
        let w: WeylWord = word_text.parse()?;
        let mut gens: Vec<u8> = w.0.clone();
        gens.sort_unstable();
        gens.dedup();
        let reports: Vec<serde_json::Value> = gens
            .iter()
            .map(|&g| {
                let r = verify_solution_preservation(g);
                json!({
                    "generator": format!("s{g}"),
                    "holds": r.holds(),
                    "residual": [r.residual.0.to_string(), r.residual.1.to_string()],
                })
            })
            .collect();
        let all = reports.iter().all(|r| r["holds"] == json!(true));
        let value = json!({ "preservation": reports.clone(), "all_hold": all });
        emit(json_mode, value, || {
            for r in &reports {
                println!(
                    "{}: preservation {}",
                    r["generator"].as_str().unwrap(),
                    if r["holds"] == json!(true) {
                        "(0,0)"
                    } else {
                        "FAILS"
                    }
                );
            }
        });
        return Ok(());
    }

    Err(Error::Usage("verify needs --solution or --word".into()))
}

#[allow(clippy::too_many_arguments)]
fn cmd_integrate(
    json_mode: bool,
    flags: &ParamFlags,
    from: f64,
    to: f64,
    tol: f64,
    y0: f64,
    x0: f64,
    csv: &Option<String>,
    word: &Option<String>,
) -> Result<(), Error> {
    let session = Session::new(flags, &[]);
    let fam = parse_family(flags)?;
    let eq = build_cli_equation(&session, flags, fam)?;
    log_info(format!("integrating {} over [{from}, {to}]", eq.family()));
    let traj = integrate(&eq, from, [y0, x0], to, tol)?;
    log_info(format!("{} samples", traj.samples.len()));

    let word_residual = match word {
        Some(w) => {
            if fam != CliFamily::Lib(FamilyId::SVI) {
                return Err(Error::Usage("--word checks apply to svi only".into()));
            }
            let tuple = session.svi_tuple(flags)?;
            let a4: Vec<f64> = tuple
                .a4()
                .iter()
                .map(|v| v.as_rational().map(|r| rat::to_f64(&r)))
                .collect::<Option<Vec<_>>>()
                .ok_or_else(|| Error::Usage("--word checks need numeric parameters".into()))?;
            let w: WeylWord = w.parse()?;
            Some(backlund_numeric_check(
                &w,
                &[a4[0], a4[1], a4[2], a4[3]],
                &traj,
            )?)
        }
        None => None,
    };

    if let Some(path) = csv {
        let mut f = std::fs::File::create(path)
            .map_err(|e| Error::Usage(format!("cannot create {path}: {e}")))?;
        traj.write_csv(&mut f)
            .map_err(|e| Error::Usage(format!("cannot write {path}: {e}")))?;
        let side_path = sidecar_path(path);
        std::fs::write(
            &side_path,
            serde_json::to_string_pretty(&traj.sidecar()).expect("serializable"),
        )
        .map_err(|e| Error::Usage(format!("cannot write {side_path}: {e}")))?;
        log_info(format!("wrote {path} and {side_path}"));
    }

    if json_mode {
        let mut value = traj.sidecar();
        value["samples"] = serde_json::to_value(&traj.samples).expect("serializable");
        if let Some(r) = word_residual {
            value["word_residual"] = json!(r);
        }
        println!(
            "{}",
            serde_json::to_string_pretty(&value).expect("serializable")
        );
    } else if csv.is_none() {
        let mut out = std::io::stdout().lock();
        traj.write_csv(&mut out)
            .map_err(|e| Error::Usage(e.to_string()))?;
        if let Some(r) = word_residual {
            writeln!(out, "# word residual {r:e}").ok();
        }
    } else if let Some(r) = word_residual {
        println!("word residual {r:e}");
    }
    Ok(())
}

fn sidecar_path(csv_path: &str) -> String {
    match csv_path.strip_suffix(".csv") {
        Some(stem) => format!("{stem}.json"),
        None => format!("{csv_path}.json"),
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_probe(
    json_mode: bool,
    flags: &ParamFlags,
    count: usize,
    degree: u32,
    seed: u64,
    from: f64,
    to: f64,
    tol: f64,
    solution: &Option<String>,
) -> Result<(), Error> {
    let session = Session::new(flags, &[solution]);
    let fam = parse_family(flags)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    // Family parameters: taken from flags when given, else drawn from the
    // seeded generator (dyadic, hence exactly representable).
    let eq = if flags.alpha.is_none() && matches!(fam, CliFamily::Lib(FamilyId::PII)) {
        let alpha: f64 = rng.gen_range(0.5..1.0);
        log_info(format!("seeded alpha = {alpha}"));
        let ctx = &session.ctx;
        let a =
            RationalFunction::constant(ctx, num::BigRational::from_float(alpha).expect("finite"));
        build_equation(FamilyId::PII, ctx, &[a])?
    } else {
        build_cli_equation(&session, flags, fam)?
    };
    if eq.second_order().is_none() {
        return Err(Error::Usage("probe works on second-order families".into()));
    }

    // Column count: t plus (y, y') per solution.
    let extra = usize::from(solution.is_some());
    let nvars = 1 + 2 * (count + extra);
    let m = monomial_basis(nvars, degree).len();
    let samples_needed = 3 * m + 8;

    // Seeded sample points over the t-range, guard band at the left end.
    let span = to - from;
    let lo = from + 0.02 * span;
    let mut ts: Vec<f64> = (0..samples_needed)
        .map(|_| rng.gen_range(lo.min(to)..lo.max(to)))
        .collect();
    ts.sort_by(f64::total_cmp);
    ts.dedup();

    let mut names = vec!["t".to_string()];
    let mut columns: Vec<Vec<f64>> = vec![ts.clone()];

    // Random initial states frequently run into movable poles; keep drawing
    // from the seeded stream until `count` trajectories survive the range.
    let mut done = 0;
    let mut attempts = 0;
    while done < count {
        attempts += 1;
        if attempts > 20 * count.max(1) {
            return Err(Error::InsufficientSamples {
                needed: ts.len(),
                got: 0,
            });
        }
        // Amplitudes large enough for the nonlinearity to set the local
        // frequency; tiny-amplitude starts behave quasi-linearly and admit
        // spurious near-relations.
        let mag: f64 = rng.gen_range(0.4..1.9);
        let sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
        let y0 = sign * mag;
        let yp0 = rng.gen_range(-2.0..2.0);
        log_debug(format!("attempt {attempts}: y0 = {y0}, y0' = {yp0}"));
        let traj = match integrate_at(&eq, from, [y0, yp0], to, tol, &ts) {
            Ok(t) => t,
            Err(Error::StepSizeUnderflow { last_t }) => {
                log_debug(format!("step underflow at {last_t}; redrawing"));
                continue;
            }
            Err(e) => return Err(e),
        };
        if traj.pole_abort.is_some() || traj.samples.len() != ts.len() {
            log_debug(format!(
                "pole abort near {:?}; redrawing",
                traj.pole_abort
            ));
            continue;
        }
        done += 1;
        names.push(format!("y{done}"));
        names.push(format!("y{done}'"));
        columns.push(traj.samples.iter().map(|s| s.y).collect());
        columns.push(traj.samples.iter().map(|s| s.x).collect());
    }

    if let Some(text) = solution {
        let y = session.solution(text)?;
        let d = Derivation::new(&session.ctx);
        let dy = d.apply(&y)?;
        let idx_t = session.ctx.var("t").index();
        let mut point = vec![0.0; session.ctx.len()];
        let mut col_y = Vec::with_capacity(ts.len());
        let mut col_dy = Vec::with_capacity(ts.len());
        for &t in &ts {
            point[idx_t] = t;
            let yv = y
                .eval_f64(&point)
                .ok_or(Error::Usage("solution column has a pole in range".into()))?;
            let dv = dy
                .eval_f64(&point)
                .ok_or(Error::Usage("solution column has a pole in range".into()))?;
            col_y.push(yv);
            col_dy.push(dv);
        }
        names.push("y0".to_string());
        names.push("y0'".to_string());
        columns.push(col_y);
        columns.push(col_dy);
    }

    let eps = 1e-6;
    let found = detect_relations(&names, &columns, degree, eps)?;
    let value = json!({
        "family": flags.family,
        "degree": degree,
        "seed": seed,
        "eps": eps,
        "columns": names,
        "samples": ts.len(),
        "candidates": found
            .iter()
            .map(|c| json!({ "relation": c.display(), "score": c.score }))
            .collect::<Vec<_>>(),
    });
    emit(json_mode, value, || {
        if found.is_empty() {
            println!("none <= degree {degree}");
        } else {
            for c in &found {
                println!("candidate (score {:.3e}): {}", c.score, c.display());
            }
        }
    });
    Ok(())
}

fn cmd_convert(
    json_mode: bool,
    flags: &ParamFlags,
    pvi: &Option<String>,
    watanabe: &Option<String>,
) -> Result<(), Error> {
    let session = Session::new(flags, &[pvi, watanabe]);

    if let Some(text) = pvi {
        let v = session.tuple4(text, "pvi")?;
        let tuples = invert_pvi(&v)?;
        let value = json!({
            "pvi": v.iter().map(|x| x.to_string()).collect::<Vec<_>>(),
            "preimages": tuples
                .iter()
                .map(|t| t.a5().iter().map(|x| x.to_string()).collect::<Vec<_>>())
                .collect::<Vec<_>>(),
            "symbols": session.symbols,
        });
        emit(json_mode, value, || {
            println!("{} preimage tuple(s):", tuples.len());
            for t in &tuples {
                let a = t.a5();
                println!("  a5 = ({}, {}, {}, {}, {})", a[0], a[1], a[2], a[3], a[4]);
            }
        });
        return Ok(());
    }

    let tuple = if let Some(text) = watanabe {
        ParamTuple::from_watanabe(session.tuple4(text, "watanabe")?)
    } else {
        session.svi_tuple(flags)?
    };
    let a5 = tuple.a5();
    let a4 = tuple.a4();
    let pvi_view = tuple.pvi();
    let wat = tuple.watanabe();
    let fmt4 = |v: &[RationalFunction; 4]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>();
    let value = json!({
        "a5": a5.iter().map(|x| x.to_string()).collect::<Vec<_>>(),
        "alphabar": fmt4(&a4),
        "pvi": fmt4(&pvi_view),
        "watanabe": fmt4(&wat),
        "symbols": session.symbols,
    });
    emit(json_mode, value, || {
        println!(
            "a5       = ({}, {}, {}, {}, {})",
            a5[0], a5[1], a5[2], a5[3], a5[4]
        );
        println!("alphabar = ({}, {}, {}, {})", a4[0], a4[1], a4[2], a4[3]);
        println!(
            "pvi      = ({}, {}, {}, {})",
            pvi_view[0], pvi_view[1], pvi_view[2], pvi_view[3]
        );
        println!("watanabe = ({}, {}, {}, {})", wat[0], wat[1], wat[2], wat[3]);
    });
    Ok(())
}

fn to_kebab<T: serde::Serialize>(v: &T) -> String {
    serde_json::to_value(v)
        .ok()
        .and_then(|j| j.as_str().map(str::to_string))
        .unwrap_or_default()
}
