use std::io::Write;
use std::process::ExitCode;

use padic_heisenberg::expr::parse_state;
use padic_heisenberg::modes::axioms::{self, AxiomReport};
use padic_heisenberg::modforms::{
    eisenstein, eisenstein_star_series, kummer_diff, quasimodular_fit, KummerChain, QSeries,
};
use padic_heisenberg::onepoint::{
    series_limit, sup_gaps, z_function_with, TraceReport, TraceRoute,
};
use padic_heisenberg::scalar::weight_limit;
use padic_heisenberg::spectral::{
    build_family, eisenstein_matched_state, resolvent_norm_profile, two_mode_states, verify_family,
    EigenFamily, PadicTarget,
};
use padic_heisenberg::{
    Error, Exec, FockState, NormValue, Prime, RExponent, Scalar, SCHEMA_VERSION,
};
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::Settings;
use crate::{Command, Format, Route, SuiteArg};

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Lib(Error),
    Io(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Lib(e)
    }
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Io(_) => 2,
            CliError::Lib(e) => match e {
                Error::NotCauchy { .. } => 1,
                Error::InsufficientChain { .. } | Error::PrecisionShort(_) => 3,
                _ => 2,
            },
        }
    }

    fn kind(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "usage",
            CliError::Io(_) => "io",
            CliError::Lib(e) => match e {
                Error::NotCauchy { .. } => "not_cauchy",
                Error::InsufficientChain { .. } => "insufficient_chain",
                Error::PrecisionShort(_) => "precision_short",
                Error::Parse { .. } => "parse",
                Error::UnderDetermined { .. } => "under_determined",
                Error::InPointSpectrum(_) => "in_point_spectrum",
                _ => "invalid_argument",
            },
        }
    }

    fn message(&self) -> String {
        match self {
            CliError::Usage(m) | CliError::Io(m) => m.clone(),
            CliError::Lib(e) => e.to_string(),
        }
    }
}

pub fn report_error(e: &CliError) -> ExitCode {
    let mut body = json!({
        "schema": SCHEMA_VERSION,
        "error": e.kind(),
        "message": e.message(),
    });
    if let CliError::Lib(Error::Parse { position, .. }) = e {
        body["position"] = json!(position);
    }
    eprintln!("{body}");
    ExitCode::from(e.code())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    Short,
}

pub struct Outcome {
    command: &'static str,
    status: Status,
    body: Body,
}

enum Body {
    Json(Value),
    Text(String),
}

impl Outcome {
    fn json(
        command: &'static str,
        status: Status,
        result: impl Serialize,
    ) -> Result<Outcome, CliError> {
        let result = serde_json::to_value(result).map_err(|e| CliError::Io(e.to_string()))?;
        Ok(Outcome {
            command,
            status,
            body: Body::Json(result),
        })
    }

    pub fn emit(self) -> ExitCode {
        match self.body {
            Body::Json(result) => {
                let doc = json!({
                    "schema": SCHEMA_VERSION,
                    "command": self.command,
                    "status": match self.status {
                        Status::Pass => "PASS",
                        Status::Fail => "FAIL",
                        Status::Short => "PRECISION_SHORT",
                    },
                    "result": result,
                });
                let text = serde_json::to_string_pretty(&doc).expect("serializable");
                let _ = writeln!(std::io::stdout(), "{text}");
            }
            Body::Text(t) => {
                let _ = write!(std::io::stdout(), "{t}");
            }
        }
        ExitCode::from(match self.status {
            Status::Pass => 0,
            Status::Fail => 1,
            Status::Short => 3,
        })
    }
}

fn prime(settings: &Settings) -> Result<Prime, CliError> {
    let p = settings
        .prime
        .ok_or_else(|| CliError::Usage("this command needs --prime (or --p)".into()))?;
    Ok(Prime::new(p)?)
}

fn parse_list(text: &str) -> Result<Vec<u32>, CliError> {
    text.split(',')
        .map(|s| {
            s.trim()
                .parse::<u32>()
                .map_err(|_| CliError::Usage(format!("bad list entry '{s}'")))
        })
        .collect()
}

fn parse_rho(text: &str) -> Result<RExponent, CliError> {
    let q: Scalar = text
        .parse()
        .map_err(|_| CliError::Usage(format!("bad rho '{text}'")))?;
    Ok(RExponent::from_scalar(&q)?)
}

fn csv(series: &QSeries) -> String {
    let mut out = String::from("n,coeff\n");
    for (n, c) in series.coeffs().iter().enumerate() {
        out.push_str(&format!("{n},{c}\n"));
    }
    out
}

fn route(r: Route) -> TraceRoute {
    match r {
        Route::Matrix => TraceRoute::Matrix,
        Route::Wick => TraceRoute::Wick,
    }
}

fn suite_status(reports: &[AxiomReport]) -> Status {
    if reports.iter().all(AxiomReport::passed) {
        Status::Pass
    } else {
        Status::Fail
    }
}

pub fn dispatch(command: Command, s: &Settings) -> Result<Outcome, CliError> {
    let exec = Exec::default();
    match command {
        Command::Zexp {
            state,
            fit,
            route: r,
            format,
        } => {
            let a = parse_state(&state, s.degree_cap)?;
            let series = z_function_with(&a, s.qmax, route(r), exec);
            if format == Format::Csv {
                return Ok(Outcome {
                    command: "zexp",
                    status: Status::Pass,
                    body: Body::Text(csv(&series)),
                });
            }
            let fit = fit
                .map(|w| quasimodular_fit(&series, w, s.qmax))
                .transpose()?;
            let status = match &fit {
                Some(f) if !f.exact => Status::Fail,
                _ => Status::Pass,
            };
            let weight = fit.as_ref().map(|f| f.weight).or(a.homogeneous_weight());
            let report =
                TraceReport::new(padic_heisenberg::expr::print_state(&a), series, weight, fit);
            Outcome::json("zexp", status, report)
        }
        Command::Eisenstein {
            k,
            star,
            chain,
            precision,
            format,
        } => {
            if !star {
                let series = eisenstein(k, s.qmax)?;
                if format == Format::Csv {
                    return Ok(Outcome {
                        command: "eisenstein",
                        status: Status::Pass,
                        body: Body::Text(csv(&series)),
                    });
                }
                return Outcome::json(
                    "eisenstein",
                    Status::Pass,
                    json!({ "k": k, "series": series }),
                );
            }
            let p = prime(s)?;
            let chain = match chain {
                Some(text) => KummerChain::new(p, parse_list(&text)?)?,
                None => KummerChain::generate(p, k, precision as usize)?,
            };
            let coeffs = eisenstein_star_series(&chain, s.qmax, precision, exec)?;
            Outcome::json(
                "eisenstein",
                Status::Pass,
                json!({
                    "k": k,
                    "prime": p,
                    "chain": chain.weights(),
                    "precision": precision,
                    "coeffs": coeffs,
                }),
            )
        }
        Command::Kummer { start, steps } => {
            let p = prime(s)?;
            let chain = KummerChain::generate(p, start, steps)?;
            let mut rows = Vec::new();
            let mut ok = true;
            for i in 0..steps {
                let gap = kummer_diff(&chain, i, s.qmax)?;
                let predicted = NormValue::p_pow_neg(p, i as i64 + 1);
                let within = gap <= predicted;
                ok &= within;
                rows.push(json!({
                    "index": i,
                    "from": chain.weights()[i],
                    "to": chain.weights()[i + 1],
                    "gap": gap,
                    "predicted": predicted,
                    "within_prediction": within,
                }));
            }
            let ks: Vec<i64> = chain.weights().iter().map(|&k| k as i64).collect();
            let limit = weight_limit(&ks, p);
            let (limit_json, even) = match &limit {
                Ok(w) => (
                    serde_json::to_value(w).map_err(|e| CliError::Io(e.to_string()))?,
                    w.is_even(),
                ),
                Err(e) => (json!({ "error": e.to_string() }), false),
            };
            ok &= limit.is_ok() && even;
            Outcome::json(
                "kummer",
                if ok { Status::Pass } else { Status::Fail },
                json!({
                    "prime": p,
                    "chain": chain.weights(),
                    "qmax": s.qmax,
                    "steps": rows,
                    "weight_limit": limit_json,
                    "even_weight": even,
                }),
            )
        }
        Command::JacobiCheck {
            degree,
            window,
            trials,
        } => {
            let r = axioms::jacobi(trials, degree, window, s.seed, exec);
            Outcome::json(
                "jacobi-check",
                suite_status(std::slice::from_ref(&r)),
                json!({ "seed": s.seed, "report": r }),
            )
        }
        Command::Axioms {
            suite,
            degree,
            bound,
            samples,
        } => {
            let reports = match suite {
                SuiteArg::Ccr => vec![axioms::ccr(degree, bound.unwrap_or(6), exec)],
                SuiteArg::Virasoro => vec![axioms::virasoro(degree, bound.unwrap_or(4), exec)],
                SuiteArg::Translation => vec![axioms::translation(samples, degree, s.seed, exec)],
                SuiteArg::Grading => vec![axioms::grading(samples, degree, s.seed, exec)],
                SuiteArg::Jacobi => vec![axioms::jacobi(
                    samples,
                    degree,
                    bound.unwrap_or(3),
                    s.seed,
                    exec,
                )],
                SuiteArg::Normcompat => {
                    let primes = match s.prime {
                        Some(p) => vec![Prime::new(p)?],
                        None => vec![Prime::new(2)?, Prime::new(5)?],
                    };
                    primes
                        .into_iter()
                        .map(|p| axioms::norm_compat(samples, degree, p, s.seed, exec))
                        .collect()
                }
            };
            Outcome::json(
                "axioms",
                suite_status(&reports),
                json!({ "seed": s.seed, "reports": reports }),
            )
        }
        Command::Resolvent { lambda, mmax } => {
            let p = prime(s)?;
            let target = PadicTarget::parse(p, &lambda)?;
            let profile = resolvent_norm_profile(&target, mmax, exec)?;
            let status = if profile.precision_short > 0 {
                Status::Short
            } else {
                Status::Pass
            };
            Outcome::json("resolvent", status, profile)
        }
        Command::EigenVerify {
            rho,
            lambda,
            family,
        } => {
            let p = prime(s)?;
            let rho = parse_rho(&rho)?;
            let target = PadicTarget::parse(p, &lambda)?;
            let text = std::fs::read_to_string(&family)
                .map_err(|e| CliError::Io(format!("{}: {e}", family.display())))?;
            let doc: Value = serde_json::from_str(&text)
                .map_err(|e| CliError::Usage(format!("family file: {e}")))?;
            let fam: EigenFamily =
                serde_json::from_value(doc.get("result").cloned().unwrap_or(doc))
                    .map_err(|e| CliError::Usage(format!("family file: {e}")))?;
            if fam.prime != p.get() {
                return Err(Error::PrimeMismatch(fam.prime, p.get()).into());
            }
            let report = verify_family(&fam.members, &target, &rho, exec);
            let status = if !report.certified {
                Status::Short
            } else if report.passed() {
                Status::Pass
            } else {
                Status::Fail
            };
            Outcome::json("eigen-verify", status, report)
        }
        Command::EigenFamily {
            rho,
            weights,
            raw,
            out,
        } => {
            let p = prime(s)?;
            let rho = parse_rho(&rho)?;
            let fam = build_family(&parse_list(&weights)?, p, &rho, !raw)?;
            let outcome = Outcome::json("eigen-family", Status::Pass, &fam)?;
            if let Some(path) = out {
                let Body::Json(result) = &outcome.body else {
                    unreachable!()
                };
                let doc = json!({ "schema": SCHEMA_VERSION, "command": "eigen-family", "result": result });
                let text = serde_json::to_string_pretty(&doc).expect("serializable");
                std::fs::write(&path, text + "\n")
                    .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
            }
            Ok(outcome)
        }
        Command::EisensteinSearch {
            k,
            degree,
            chain,
            precision,
        } => {
            let target = eisenstein(k, s.qmax)?;
            let mut matches = Vec::new();
            let candidates: Vec<_> = two_mode_states(k)
                .into_iter()
                .filter(|(_, b, _)| *b <= degree)
                .collect();
            for (a, b, state) in &candidates {
                let z = z_function_with(state, s.qmax, TraceRoute::Wick, exec);
                let c = z.coeff(0).clone();
                if !c.is_zero() && z == target.scale(&c) {
                    matches.push(json!({ "a": a, "b": b, "state": format!("h[-{a}] h[-{b}] vac"), "scale": c }));
                }
            }
            let mut result = json!({
                "k": k,
                "qmax": s.qmax,
                "scanned": candidates.len(),
                "matches": matches,
            });
            let mut status = Status::Pass;
            if let Some(text) = chain {
                let p = prime(s)?;
                let chain = KummerChain::new(p, parse_list(&text)?)?;
                let states: Vec<FockState> = chain
                    .weights()
                    .iter()
                    .map(|&w| eisenstein_matched_state(w))
                    .collect::<Result<_, Error>>()?;
                let state_gaps = sup_gaps(&states, p)?;
                let images: Vec<QSeries> = states
                    .iter()
                    .map(|a| z_function_with(a, s.qmax, TraceRoute::Wick, exec))
                    .collect();
                let limit = series_limit(&images, p, precision)?;
                let star = eisenstein_star_series(&chain, s.qmax, precision, exec)?;
                let agree = star
                    .iter()
                    .zip(&limit.residues)
                    .all(|(st, r)| st.residue.to_string() == *r);
                if !agree {
                    status = Status::Fail;
                }
                result["chain"] = json!({
                    "prime": p,
                    "weights": chain.weights(),
                    "state_gaps": state_gaps,
                    "limit": limit,
                    "matches_eisenstein_star": agree,
                });
            }
            Outcome::json("eisenstein-search", status, result)
        }
    }
}
