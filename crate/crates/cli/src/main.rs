use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use num_rational::Rational64;
use serde_json::{json, Value};

use lgcy_core::blocks::FactorizationBlocks;
use lgcy_core::fukaya::{
    addition_formula_check, apply_symplectomorphism, enumerate_decorated_polygons, standard_triangle_counts,
    strip_matrix, theta_in_area_units, theta_series, unit_output_name, LinearLagrangian, SeidelConfig,
    TRIANGLE_OUTPUT,
};
use lgcy_core::mfcat::check_factorization;
use lgcy_core::mirror::{diagram_check, lm_object};
use lgcy_core::orlov::OrlovPipeline;
use lgcy_core::ring::build_w;
use lgcy_core::{Cutoff, Monomial, QExp};

#[derive(Parser, Debug)]
#[command(name = "lgcy", version, about = "Exact checks of the LG/CY and localized mirror functor pipelines")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Truncation order, an exact decimal or fraction ("200", "0.5", "9/4").
    #[arg(long, global = true, value_parser = parse_cutoff)]
    cutoff: Option<QExp>,
    #[arg(long, global = true, default_value_t = 0, allow_negative_numbers = true)]
    index: i64,
    #[arg(long = "degree-bound", global = true, default_value_t = 6)]
    degree_bound: u32,
    #[arg(long, global = true, value_enum, default_value_t = Output::Json)]
    output: Output,
    /// Lagrangian `a,b,c`: direction (a, b) through the point (c, 0).
    #[arg(long, global = true, value_parser = parse_target, allow_hyphen_values = true)]
    target: Option<TargetSpec>,
}

#[derive(Subcommand, Debug, Clone, Copy, PartialEq, Eq)]
enum Command {
    /// Potential W from the series φ, ψ and the resolved sign pattern.
    Potential,
    /// Validate the factorizations M₀ and M₁.
    MfCheck,
    /// Periodic tails of the two Orlov resolutions.
    Orlov,
    /// Decorated-polygon counts, or strip counts for `--target`.
    FukayaCount,
    /// Theta addition formula and triangle counts.
    Theta,
    /// Compare both functors on the generators at `--index`.
    Diagram,
}

impl Command {
    fn default_cutoff(self) -> QExp {
        match self {
            Command::Theta => QExp::integer(50),
            Command::FukayaCount => QExp::integer(130),
            _ => QExp::integer(200),
        }
    }
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum Output {
    Json,
    Text,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct TargetSpec {
    a: i64,
    b: i64,
    c: Rational64,
}

fn parse_cutoff(text: &str) -> Result<QExp, String> {
    let value = QExp::parse_decimal(text).map_err(|err| err.to_string())?;
    if !value.is_positive() {
        return Err(format!("cutoff must be positive, got {value}"));
    }
    Ok(value)
}

fn parse_target(text: &str) -> Result<TargetSpec, String> {
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    let [a, b, c] = parts.as_slice() else {
        return Err(format!("expected a,b,c, got {text:?}"));
    };
    let a = a.parse().map_err(|_| format!("bad direction component {a:?}"))?;
    let b = b.parse().map_err(|_| format!("bad direction component {b:?}"))?;
    let c = QExp::parse_decimal(c).map_err(|err| err.to_string())?.ratio();
    LinearLagrangian::through(a, b, c).map_err(|err| err.to_string())?;
    Ok(TargetSpec { a, b, c })
}

struct Report {
    json: Value,
    text: String,
    pass: bool,
}

type Outcome = Result<Report, Box<dyn std::error::Error>>;

fn potential(cutoff: QExp) -> Outcome {
    let bundle = build_w(cutoff)?;
    let signs = match bundle.sign_s {
        Some(signs) => format!("s1 = {}, s2 = {}", signs.s1, signs.s2),
        None => "undetermined below this cutoff".to_string(),
    };
    Ok(Report {
        text: format!("phi = {}\npsi = {}\nsign pattern: {signs}\nW = {}", bundle.phi, bundle.psi, bundle.w),
        json: bundle.to_json(),
        pass: true,
    })
}

fn mf_check(cutoff: QExp) -> Outcome {
    let blocks = FactorizationBlocks::new(cutoff)?;
    let limit = Cutoff::Finite(cutoff);
    let mut json = serde_json::Map::new();
    let mut text = Vec::new();
    let mut pass = true;
    for (name, mf) in [("M0", blocks.m0()), ("M1", blocks.m1())] {
        let report = check_factorization(&mf, blocks.w(), limit)?;
        pass &= report.passed();
        text.push(format!(
            "{name}: composites {} grading {} valuation {} twists {} / {}",
            report.composites_ok, report.grading_ok, report.valuation_ok, mf.p0_twists, mf.p1_twists
        ));
        json.insert(
            name.to_string(),
            json!({
                "composites_ok": report.composites_ok,
                "grading_ok": report.grading_ok,
                "valuation_ok": report.valuation_ok,
                "P0": mf.p0_twists.0,
                "P1": mf.p1_twists.0,
            }),
        );
    }
    json.insert("cutoff".to_string(), json!(cutoff.to_string()));
    json.insert("pass".to_string(), json!(pass));
    Ok(Report {
        json: Value::Object(json),
        text: text.join("\n"),
        pass,
    })
}

fn orlov(cutoff: QExp) -> Outcome {
    let pipeline = OrlovPipeline::new(cutoff)?;
    let limit = Cutoff::Finite(cutoff);
    let reference = [pipeline.blocks.m0().truncate(limit), pipeline.blocks.m1().truncate(limit)];
    let tails = [pipeline.object_o()?, pipeline.object_o1()?];
    let matches: Vec<bool> = tails
        .iter()
        .zip(&reference)
        .map(|(tail, expected)| {
            tail.p0_twists == expected.p0_twists
                && tail.p1_twists == expected.p1_twists
                && tail.p0.agrees_below(&expected.p0, limit) == Some(true)
                && tail.p1.agrees_below(&expected.p1, limit) == Some(true)
        })
        .collect();
    let pass = matches.iter().all(|m| *m);
    Ok(Report {
        text: format!(
            "O: twists {} / {} equals M0: {}\nO(1): twists {} / {} equals M1: {}",
            tails[0].p0_twists, tails[0].p1_twists, matches[0], tails[1].p0_twists, tails[1].p1_twists, matches[1]
        ),
        json: json!({
            "cutoff": cutoff.to_string(),
            "normalization": { "twist": 0, "parity": 0 },
            "complexes": { "cone_phi": pipeline.cone.to_json(), "resolution_a1": pipeline.resolution.to_json() },
            "tails": { "O": tails[0].to_json(), "O(1)": tails[1].to_json() },
            "matches": { "O": matches[0], "O(1)": matches[1] },
            "pass": pass,
        }),
        pass,
    })
}

fn fukaya_count(cutoff: QExp, index: i64, target: Option<TargetSpec>) -> Outcome {
    let config = SeidelConfig::standard();
    let limit = Cutoff::Finite(cutoff);
    let w = build_w(cutoff)?.w;
    match target {
        None => {
            let mut outputs = serde_json::Map::new();
            let mut text = Vec::new();
            let mut pass = true;
            for output in 0..3 {
                let name = unit_output_name(output);
                let counts = enumerate_decorated_polygons(&config, output, cutoff);
                let matches = counts.polynomial(&name).agrees_below(&w, limit) == Some(true);
                pass &= matches;
                text.push(format!("{name}: equals W {matches}"));
                outputs.insert(name, json!({ "counts": counts.to_json(), "equals_w": matches }));
            }
            Ok(Report {
                json: json!({ "cutoff": cutoff.to_string(), "potential": outputs, "pass": pass }),
                text: text.join("\n"),
                pass,
            })
        }
        Some(target) => {
            let lagrangian = LinearLagrangian::through(target.a, target.b, target.c)?;
            let image = apply_symplectomorphism(index, &lagrangian);
            let complex = strip_matrix(&config, &image.lagrangian, cutoff)?;
            let object = lm_object(&config, index, &lagrangian, cutoff)?;
            let report = check_factorization(&object.factorization, &w, limit)?;
            let pass = report.passed();
            Ok(Report {
                text: format!(
                    "image direction {:?} family {}\ntwists {} / {}\nfactorizes W: {pass}",
                    image.lagrangian.direction.vector(),
                    complex.family,
                    object.factorization.p0_twists,
                    object.factorization.p1_twists
                ),
                json: json!({
                    "index": index,
                    "image": image.lagrangian.to_json(),
                    "counts": complex.counts(cutoff).to_json(),
                    "factorization": object.factorization.to_json(),
                    "pass": pass,
                }),
                pass,
            })
        }
    }
}

fn theta(cutoff: QExp) -> Outcome {
    let formula = addition_formula_check(cutoff);
    let triangles = standard_triangle_counts(cutoff)?;
    let half = Rational64::new(1, 2);
    let expected = [
        ("q(0,0)", theta_in_area_units(Rational64::from_integer(0), cutoff)),
        ("q(1/2,0)", theta_in_area_units(half, cutoff)),
    ];
    let limit = Cutoff::Finite(cutoff);
    let triangle_match = expected.iter().all(|(key, series)| {
        debug_assert!(key.starts_with(TRIANGLE_OUTPUT));
        triangles.series(key, Monomial::ONE).agrees_below(series, limit) == Some(true)
    });
    let pass = formula && triangle_match;
    Ok(Report {
        text: format!("addition formula: {formula}\ntriangle counts equal theta series: {triangle_match}"),
        json: json!({
            "cutoff": cutoff.to_string(),
            "theta_0": theta_series(Rational64::from_integer(0), cutoff).to_quadruples(),
            "theta_half": theta_series(half, cutoff).to_quadruples(),
            "addition_formula": formula,
            "triangles": triangles.to_json(),
            "triangles_match": triangle_match,
            "pass": pass,
        }),
        pass,
    })
}

fn diagram(cutoff: QExp, index: i64, degree_bound: u32) -> Outcome {
    let report = diagram_check(index, cutoff, degree_bound)?;
    let text = report
        .comparisons
        .iter()
        .map(|c| format!("{:<6} {:<8} {}", c.name, c.kind, if c.passed() { "pass" } else { "FAIL" }))
        .chain(std::iter::once(format!("overall: {}", if report.pass() { "pass" } else { "FAIL" })))
        .collect::<Vec<_>>()
        .join("\n");
    Ok(Report {
        json: report.to_json(),
        text,
        pass: report.pass(),
    })
}

fn configure_threads() {
    #[cfg(feature = "parallel")]
    if let Some(threads) = std::env::var("LGCY_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    configure_threads();
    let cutoff = cli.cutoff.unwrap_or_else(|| cli.command.default_cutoff());
    let outcome = match cli.command {
        Command::Potential => potential(cutoff),
        Command::MfCheck => mf_check(cutoff),
        Command::Orlov => orlov(cutoff),
        Command::FukayaCount => fukaya_count(cutoff, cli.index, cli.target),
        Command::Theta => theta(cutoff),
        Command::Diagram => diagram(cutoff, cli.index, cli.degree_bound),
    };
    let report = match outcome {
        Ok(report) => report,
        Err(err) => Report {
            json: json!({ "error": err.to_string(), "pass": false }),
            text: format!("error: {err}"),
            pass: false,
        },
    };
    match cli.output {
        Output::Json => println!("{}", serde_json::to_string_pretty(&report.json).expect("serializable")),
        Output::Text => println!("{}", report.text),
    }
    if report.pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
