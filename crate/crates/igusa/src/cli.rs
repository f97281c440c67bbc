use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use igusa_core::continuation::{evaluate_continued, laurent_at, pole_report, ContinuationConfig};
use igusa_core::mpoly::{affine_names, homogeneous_names, parse_poly, restrict_chart, MPoly};
use igusa_core::quadrature::QuadConfig;
use igusa_core::recurrence::{guess_ode, guess_recurrence, ode_to_recurrence, verify_recurrence, SearchConfig};
use igusa_core::simplex::{moments, sampled_minimum, Domain};

use crate::json::{
    load_domain, to_json, CriterionJson, EvalJson, GuessJson, LaurentJson, MomentsJson, OdeJson, PoleJson,
    PolesJson, PolyRowsJson, Sci, SelftestJson, VerificationJson,
};
use crate::selftest;
use crate::CliError;

const NONNEGATIVITY_SAMPLES: usize = 512;

#[derive(Parser, Debug)]
#[command(name = "igusa", version, about = "Exact moments, recurrences and meromorphic continuation of ∫ f^s over simplices")]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Polynomial, e.g. "3/2*x1^3 + x1*x2"
    #[arg(short = 'f', long = "poly", global = true)]
    pub f: Option<String>,
    /// Domain JSON (inline or a file path), or "standard"
    #[arg(short = 'd', long = "domain", global = true, default_value = "standard")]
    pub domain: String,
    /// Number of variables
    #[arg(short = 'n', long = "nvars", global = true)]
    pub nvars: Option<usize>,
    /// Read f in x0..xn and restrict it to the chart x0 = 1 - x1 - ... - xn
    #[arg(long, global = true)]
    pub homogeneous: bool,
    #[arg(long, global = true, default_value_t = 3)]
    pub max_order: usize,
    #[arg(long, global = true, default_value_t = 4)]
    pub max_degree: usize,
    /// Held-out moments used to confirm a guessed recurrence
    #[arg(long = "verify", global = true, default_value_t = 20)]
    pub verify: usize,
    #[arg(long, global = true, default_value_t = 1e-11)]
    pub quad_tol: f64,
    #[arg(long, global = true, default_value_t = 40)]
    pub quad_max_depth: u32,
    /// Gauss points per axis
    #[arg(long, global = true, default_value_t = 10)]
    pub quad_rule: usize,
    /// Write the document here instead of standard output
    #[arg(short = 'o', long = "output", global = true)]
    pub output: Option<PathBuf>,
}

#[derive(Subcommand, Debug, Clone)]
pub enum Command {
    /// Exact moments I(0..=N)
    Moments {
        #[arg(short = 'N')]
        n_max: usize,
    },
    /// Guess and verify the recurrence Σ c_i(s) I(s+i) = 0
    Guess {
        #[arg(short = 'N')]
        n_max: Option<usize>,
    },
    /// Guess an ODE for Σ I(l) t^l and convert it to a recurrence
    Ode {
        #[arg(short = 'N')]
        n_max: Option<usize>,
    },
    /// Laurent expansion at an integer
    Laurent {
        #[arg(long = "s0", allow_negative_numbers = true)]
        s0: i64,
        #[arg(short = 'K', default_value_t = 0)]
        k: usize,
    },
    /// Value of the continued function at a real point
    Eval {
        #[arg(short = 's', allow_negative_numbers = true)]
        s: f64,
    },
    /// Poles at the integers s_min..=-1
    Poles {
        #[arg(long = "s-min", allow_negative_numbers = true)]
        s_min: i64,
    },
    /// Run the acceptance suite
    Selftest,
}

/// A rendered document and the exit code to finish with.
pub struct Report {
    pub document: String,
    pub exit_code: i32,
}

impl Common {
    fn quad(&self) -> Result<QuadConfig, CliError> {
        let cfg = QuadConfig {
            tol: self.quad_tol,
            max_depth: self.quad_max_depth,
            base_rule: self.quad_rule,
            ..QuadConfig::default()
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn search(&self) -> SearchConfig {
        SearchConfig { max_order: self.max_order, max_degree: self.max_degree, verify_count: self.verify }
    }

    fn continuation(&self) -> Result<ContinuationConfig, CliError> {
        Ok(ContinuationConfig { quad: self.quad()?, ..ContinuationConfig::default() })
    }

    fn problem(&self) -> Result<(MPoly, Domain), CliError> {
        let text = self.f.as_deref().ok_or_else(|| CliError::Usage("missing polynomial `-f`".into()))?;
        let d = load_domain(&self.domain, self.nvars)?;
        let n = d.nvars();
        let f = if self.homogeneous {
            let names = homogeneous_names(n);
            let refs: Vec<&str> = names.iter().map(String::as_str).collect();
            restrict_chart(&parse_poly(text, &refs)?)?
        } else {
            let names = affine_names(n);
            let refs: Vec<&str> = names.iter().map(String::as_str).collect();
            parse_poly(text, &refs)?
        };
        let low = sampled_minimum(&f, &d, NONNEGATIVITY_SAMPLES);
        if low < 0.0 {
            log::warn!("f is negative at a sampled point of the domain (value {low:e}); I(s) may be undefined");
        }
        Ok((f, d))
    }
}

pub fn run(cli: &Cli) -> Result<Report, CliError> {
    let c = &cli.common;
    let document = match &cli.command {
        Command::Moments { n_max } => {
            let (f, d) = c.problem()?;
            to_json(&MomentsJson::from_moments(&moments(&f, &d, *n_max)?))
        }
        Command::Guess { n_max } => {
            let (f, d) = c.problem()?;
            let search = c.search();
            let m = moments(&f, &d, n_max.unwrap_or(search.moments_needed()))?;
            let g = guess_recurrence(&m, &search)?;
            to_json(&GuessJson {
                recurrence: PolyRowsJson::from_recurrence(&g.recurrence),
                order: g.recurrence.order(),
                degree: g.recurrence.degree(),
                moments_used: m.len(),
                verification: VerificationJson::from(&g.report),
                nullity: g.nullity,
                ambiguous: g.ambiguous,
            })
        }
        Command::Ode { n_max } => {
            let (f, d) = c.problem()?;
            let search = c.search();
            let count = n_max.unwrap_or(search.moments_needed().max(search.series_needed()));
            let m = moments(&f, &d, count)?;
            let terms = search.series_needed().min(m.len());
            let ode = guess_ode(&m.values[..terms], search.max_order, search.max_degree)?;
            let rec = ode_to_recurrence(&ode);
            let report = verify_recurrence(&rec, &m);
            to_json(&OdeJson {
                ode: PolyRowsJson::from_ode(&ode),
                order: ode.order(),
                recurrence: PolyRowsJson::from_recurrence(&rec),
                verification: VerificationJson::from(&report),
            })
        }
        Command::Laurent { s0, k } => {
            let (f, d) = c.problem()?;
            let rec = guessed(c, &f, &d)?;
            let e = laurent_at(&f, &d, &rec, *s0, *k, &c.continuation()?)?;
            to_json(&LaurentJson::from(&e))
        }
        Command::Eval { s } => {
            let (f, d) = c.problem()?;
            let rec = guessed(c, &f, &d)?;
            let v = evaluate_continued(&f, &d, &rec, *s, &c.continuation()?)?;
            to_json(&EvalJson { s: Sci(*s), value: Sci(v.value), err: Sci(v.err_estimate) })
        }
        Command::Poles { s_min } => {
            let (f, d) = c.problem()?;
            let rec = guessed(c, &f, &d)?;
            let poles = pole_report(&f, &d, &rec, *s_min, &c.continuation()?)?;
            to_json(&PolesJson { s_min: *s_min, poles: poles.iter().map(PoleJson::from).collect() })
        }
        Command::Selftest => {
            let results = selftest::run_all();
            for r in &results {
                eprintln!("{}", r.line());
            }
            let passed = results.iter().all(|r| r.passed);
            let doc = SelftestJson {
                passed,
                criteria: results
                    .iter()
                    .map(|r| CriterionJson {
                        id: r.id,
                        name: r.name.to_string(),
                        passed: r.passed,
                        detail: r.detail.clone(),
                        seconds: Sci(r.seconds),
                    })
                    .collect(),
            };
            return Ok(Report { document: to_json(&doc), exit_code: if passed { 0 } else { 1 } });
        }
    };
    Ok(Report { document, exit_code: 0 })
}

fn guessed(c: &Common, f: &MPoly, d: &Domain) -> Result<igusa_core::Recurrence, CliError> {
    let search = c.search();
    let m = moments(f, d, search.moments_needed())?;
    let g = guess_recurrence(&m, &search)?;
    if g.ambiguous {
        log::warn!("several independent recurrences of minimal size; using the lowest-degree one");
    }
    log::info!("recurrence of order {}: {}", g.recurrence.order(), g.recurrence);
    Ok(g.recurrence)
}
