use cf_core::digits::{
    convergent_table, expand_rational, fractional_part, parse_decimal, RealNumber,
};
use cf_core::dimension::{box_count_report, sample_graph, BoxCountReport, Target};
use cf_core::error_sum::{eval_e, eval_e_real, eval_p, eval_p_real, ErrorSumValue};
use cf_core::series::{a_n_partial, b_n_partial, PerLength, SeriesReport};
use cf_core::symbolic::{
    enumerate_by_denominator, enumerate_by_length, fundamental_interval, IntervalRow,
};
use cf_core::verify::{bounds_suite, conversion_suite, lemmas_suite, VerifyReport};
use cf_core::{CfError, DigitString, Enclosure, Rational};
use rug::Float;
use serde::Serialize;
use serde_json::json;

use crate::output::{CliResult, Format, Sink};
use crate::{Cli, Command, Function, Suite};

pub fn run(cli: &Cli) -> CliResult<u8> {
    let g = &cli.global;
    let prec = g.precision;
    match &cli.command {
        Command::Expand { x } => expand(Sink::open(g, Format::Text)?, x),
        Command::Eval { function, at, tol } => {
            eval(Sink::open(g, Format::Text)?, *function, at, *tol, prec)
        }
        Command::Interval { sigma } => interval(Sink::open(g, Format::Csv)?, sigma),
        Command::Enumerate {
            length,
            cap,
            cutoff,
        } => enumerate(Sink::open(g, Format::Csv)?, *length, *cap, *cutoff),
        Command::Verify {
            suite,
            seed,
            count,
            round_trip_cap,
            cutoff,
            epsilon,
        } => {
            let report = match suite {
                Suite::Lemmas => lemmas_suite(*seed, *count, *round_trip_cap)?,
                Suite::Conversion => {
                    conversion_suite(cutoff.first().copied().unwrap_or(100), prec)?
                }
                Suite::Bounds => {
                    let cutoffs = if cutoff.is_empty() {
                        vec![100, 1000, 10000]
                    } else {
                        cutoff.clone()
                    };
                    bounds_suite(*epsilon, &cutoffs, prec)?
                }
            };
            verify(Sink::open(g, Format::Text)?, &report)
        }
        Command::Series {
            weight,
            epsilon,
            cutoff,
            per_length,
            digit_cap,
        } => {
            let per = match (per_length, digit_cap) {
                (Some(n_max), Some(digit_cap)) => Some(PerLength {
                    n_max: *n_max,
                    digit_cap: *digit_cap,
                }),
                _ => None,
            };
            let report = match weight {
                Function::E => a_n_partial(*epsilon, *cutoff, per, prec)?,
                Function::P => b_n_partial(*epsilon, *cutoff, per, prec)?,
            };
            series(Sink::open(g, Format::Json)?, *weight, &report)
        }
        Command::Graph {
            function,
            cap,
            decimal,
        } => graph(Sink::open(g, Format::Csv)?, *function, *cap, *decimal),
        Command::Dimension {
            function,
            cap,
            scales,
        } => {
            let scales = parse_scales(scales)?;
            let points = sample_graph(target(*function), *cap)?;
            let report = box_count_report(&points, &scales, *cap, Some(target(*function)))?;
            if let Some(w) = &report.warning {
                eprintln!("warning: {w}");
            }
            dimension(Sink::open(g, Format::Json)?, &report)
        }
    }
}

fn target(f: Function) -> Target {
    match f {
        Function::E => Target::E,
        Function::P => Target::P,
    }
}

fn name(f: Function) -> &'static str {
    match f {
        Function::E => "E",
        Function::P => "P",
    }
}

fn expand(sink: Sink, input: &str) -> CliResult<u8> {
    let x = parse_decimal(input)?;
    let reduced = fractional_part(&x);
    let sigma = expand_rational(&reduced)?;
    let table = convergent_table(&sigma);
    let p: Vec<String> = table.p_values()[1..]
        .iter()
        .map(|v| v.to_string())
        .collect();
    let q: Vec<String> = table.q_values()[1..]
        .iter()
        .map(|v| v.to_string())
        .collect();
    let sibling = sigma.sibling().ok();
    let note = (reduced != x).then(|| format!("{x} reduced to {reduced} by periodicity"));
    let digits_text = if sigma.is_empty() {
        "(empty)".to_string()
    } else {
        sigma.to_string()
    };
    let sibling_text = sibling
        .as_ref()
        .map_or("none".to_string(), |s| s.to_string());

    match sink.format {
        Format::Text => {
            let mut lines = Vec::new();
            if let Some(n) = &note {
                lines.push(format!("note: {n}"));
            }
            lines.push(format!(
                "digits: {digits_text} | sibling: {sibling_text} | q: {}",
                q.join(",")
            ));
            lines.push(format!("p: {}", p.join(",")));
            lines.push(format!("value: {reduced}"));
            lines.push(format!(
                "realizable: {}",
                if sigma.is_realizable() { "yes" } else { "no" }
            ));
            sink.text(&lines.join("\n"))?;
        }
        Format::Json => sink.json(
            "cf.expand/1",
            json!({
                "input": input,
                "x": reduced.to_string(),
                "note": note,
                "digits": sigma.digits(),
                "sibling": sibling.as_ref().map(|s| s.digits().to_vec()),
                "realizable": sigma.is_realizable(),
                "p": p,
                "q": q,
            }),
        )?,
        Format::Csv | Format::Tsv => {
            let comments: Vec<String> = note.into_iter().collect();
            let rows = (0..=sigma.len()).map(|k| {
                vec![
                    k.to_string(),
                    if k == 0 {
                        String::new()
                    } else {
                        sigma.digits()[k - 1].to_string()
                    },
                    p[k].clone(),
                    q[k].clone(),
                ]
            });
            sink.table(&comments, &["k", "digit", "p", "q"], rows)?;
        }
    }
    Ok(0)
}

fn is_decimal(s: &str) -> bool {
    !s.contains('/')
}

fn eval(sink: Sink, function: Function, at: &str, tol: Option<f64>, prec: u32) -> CliResult<u8> {
    let value = match tol {
        Some(t) if is_decimal(at) => {
            if !(t > 0.0 && t.is_finite()) {
                return Err(CfError::InvalidParameter("tolerance must be positive".into()).into());
            }
            let x = RealNumber::from_decimal(at)?;
            let x = RealNumber {
                center: fractional_part(&x.center),
                radius: x.radius,
            };
            match function {
                Function::E => eval_e_real(&x, t, prec)?,
                Function::P => eval_p_real(&x, t, prec)?,
            }
        }
        _ => {
            let x = parse_decimal(at)?;
            ErrorSumValue::Exact(match function {
                Function::E => eval_e(&x),
                Function::P => eval_p(&x),
            })
        }
    };
    let (shown, radius) = match &value {
        ErrorSumValue::Exact(r) => (r.to_string(), "0".to_string()),
        ErrorSumValue::Enclosed { enclosure, .. } => (
            enclosure.mid().to_string_radix(10, Some(20)),
            format!(
                "{:e}",
                enclosure.radius().to_f64_round(rug::float::Round::Up)
            ),
        ),
    };
    match sink.format {
        Format::Text => match &value {
            ErrorSumValue::Exact(r) => sink.text(&r.to_string())?,
            ErrorSumValue::Enclosed { enclosure, .. } => sink.text(&enclosure.to_string())?,
        },
        Format::Json => sink.json(
            "cf.eval/1",
            json!({
                "function": name(function),
                "at": at,
                "exact": value.is_exact(),
                "value": shown,
                "radius": radius,
                "enclosure": value.enclosure(prec),
                "terms_used": value.terms_used(),
            }),
        )?,
        Format::Csv | Format::Tsv => sink.table(
            &[],
            &["function", "at", "value", "radius"],
            [vec![
                name(function).to_string(),
                at.to_string(),
                shown,
                radius,
            ]],
        )?,
    }
    Ok(0)
}

fn row_fields(r: IntervalRow) -> Vec<String> {
    vec![
        r.sigma,
        r.n.to_string(),
        r.q_n,
        r.q_prev,
        r.left,
        r.right,
        r.length,
    ]
}

const INTERVAL_HEADER: [&str; 7] = ["sigma", "n", "q_n", "q_prev", "left", "right", "length"];

fn interval(sink: Sink, sigma: &str) -> CliResult<u8> {
    let sigma: DigitString = sigma.parse()?;
    let iv = fundamental_interval(&sigma)?;
    match sink.format {
        Format::Text => sink.text(&format!("I_({sigma}) = {iv} | length: {}", iv.length))?,
        Format::Json => sink.json(
            "cf.interval/1",
            json!({ "interval": iv.to_row(), "display": iv.to_string() }),
        )?,
        Format::Csv | Format::Tsv => {
            sink.table(&[], &INTERVAL_HEADER, [row_fields(iv.to_row())])?
        }
    }
    Ok(0)
}

fn enumerate(
    sink: Sink,
    length: Option<usize>,
    cap: Option<u64>,
    cutoff: Option<u64>,
) -> CliResult<u8> {
    let strings: Box<dyn Iterator<Item = DigitString>> = match (length, cap, cutoff) {
        (Some(n), Some(c), None) => Box::new(enumerate_by_length(n, c)?),
        (None, None, Some(j)) => Box::new(enumerate_by_denominator(j)?),
        _ => return Err("give either --length with --cap, or --cutoff".into()),
    };
    let rows = strings.map(|s| fundamental_interval(&s).map(|iv| iv.to_row()));
    match sink.format {
        Format::Json => {
            let rows = rows.collect::<Result<Vec<_>, _>>()?;
            sink.json(
                "cf.enumerate/1",
                json!({ "count": rows.len(), "rows": rows }),
            )?;
        }
        Format::Text | Format::Csv | Format::Tsv => {
            let rows = rows.map(|r| row_fields(r.expect("non-empty string")));
            sink.table(&[], &INTERVAL_HEADER, rows)?;
        }
    }
    Ok(0)
}

fn verify(sink: Sink, report: &VerifyReport) -> CliResult<u8> {
    let status = if report.all_pass() { 0 } else { 2 };
    match sink.format {
        Format::Text => sink.text(&report.to_string())?,
        Format::Json => sink.json(
            "cf.verify/1",
            json!({ "suite": report.suite, "pass": report.all_pass(), "checks": report.checks }),
        )?,
        Format::Csv | Format::Tsv => {
            let rows = report.checks.iter().map(|c| {
                vec![
                    c.name.clone(),
                    if c.ok() { "PASS" } else { "FAIL" }.to_string(),
                    c.passed.to_string(),
                    c.total.to_string(),
                    c.detail.clone(),
                    c.counterexample.clone().unwrap_or_default(),
                ]
            });
            sink.table(
                &[],
                &[
                    "check",
                    "status",
                    "passed",
                    "total",
                    "detail",
                    "counterexample",
                ],
                rows,
            )?;
        }
    }
    Ok(status)
}

fn enclosure_cells(e: &Enclosure) -> [String; 2] {
    [
        e.mid().to_string_radix(10, Some(20)),
        format!("{:e}", e.radius().to_f64_round(rug::float::Round::Up)),
    ]
}

fn series(sink: Sink, weight: Function, report: &SeriesReport) -> CliResult<u8> {
    match sink.format {
        Format::Json => {
            #[derive(Serialize)]
            struct Body<'a> {
                weight: &'static str,
                bound: &'a Enclosure,
                bound_label: &'a str,
                #[serde(flatten)]
                report: &'a SeriesReport,
            }
            let primary = &report.bounds[0];
            sink.json(
                "cf.series/1",
                Body {
                    weight: name(weight),
                    bound: &primary.bound,
                    bound_label: &primary.label,
                    report,
                },
            )?;
        }
        Format::Text | Format::Csv | Format::Tsv => {
            let mut comments = vec![
                format!(
                    "weight={} epsilon={} cutoff={}",
                    name(weight),
                    report.epsilon,
                    report.cutoff
                ),
                format!("partial_sum={}", report.partial_sum),
            ];
            for b in &report.bounds {
                comments.push(format!("bound {} = {}: {:?}", b.label, b.bound, b.verdict));
            }
            if report.near_divergence {
                comments.push("epsilon is within 0.05 of the divergence threshold 1/2".into());
            }
            let rows = report.per_length.iter().map(|r| {
                let [v, vr] = enclosure_cells(&r.value);
                let [w, wr] = enclosure_cells(&r.n_plus_1_times_value);
                vec![r.n.to_string(), v, vr, w, wr]
            });
            sink.table(
                &comments,
                &[
                    "n",
                    "value",
                    "value_radius",
                    "n_plus_1_times_value",
                    "n_plus_1_times_value_radius",
                ],
                rows,
            )?;
        }
    }
    Ok(0)
}

fn decimal(r: &Rational) -> String {
    Float::with_val(64, r).to_f64().to_string()
}

fn graph(sink: Sink, function: Function, cap: u64, with_decimal: bool) -> CliResult<u8> {
    let points = sample_graph(target(function), cap)?;
    match sink.format {
        Format::Json => {
            let pts: Vec<[String; 2]> = points
                .iter()
                .map(|p| [p.x.to_string(), p.y.to_string()])
                .collect();
            sink.json(
                "cf.graph/1",
                json!({ "function": name(function), "cap": cap, "points": pts }),
            )?;
        }
        Format::Text | Format::Csv | Format::Tsv => {
            let header: &[&str] = if with_decimal {
                &["x", "y", "x_decimal", "y_decimal"]
            } else {
                &["x", "y"]
            };
            let rows = points.iter().map(|p| {
                let mut row = vec![p.x.to_string(), p.y.to_string()];
                if with_decimal {
                    row.push(decimal(&p.x));
                    row.push(decimal(&p.y));
                }
                row
            });
            sink.table(&[], header, rows)?;
        }
    }
    Ok(0)
}

fn parse_scales(s: &str) -> CliResult<Vec<u32>> {
    let bad = || format!("invalid scales {s:?}; expected lo:hi or a comma list");
    let scales: Vec<u32> = match s.split_once(':') {
        Some((lo, hi)) => {
            let lo: u32 = lo.trim().parse().map_err(|_| bad())?;
            let hi: u32 = hi.trim().parse().map_err(|_| bad())?;
            (lo..=hi).collect()
        }
        None => s
            .split(',')
            .map(|t| t.trim().parse().map_err(|_| bad()))
            .collect::<Result<_, _>>()?,
    };
    if scales.len() < 2 {
        return Err(bad().into());
    }
    Ok(scales)
}

fn dimension(sink: Sink, report: &BoxCountReport) -> CliResult<u8> {
    match sink.format {
        Format::Json => sink.json("cf.dimension/1", report)?,
        Format::Text | Format::Csv | Format::Tsv => {
            let mut comments = vec![format!(
                "slope={} intercept={} residual={} samples={}",
                report.slope, report.intercept, report.residual, report.samples_used
            )];
            comments.extend(report.warning.iter().map(|w| format!("warning: {w}")));
            let rows = report
                .scales
                .iter()
                .zip(&report.counts)
                .map(|(i, c)| vec![i.to_string(), format!("1/{}", 1u128 << i), c.to_string()]);
            sink.table(&comments, &["scale", "side", "count"], rows)?;
        }
    }
    Ok(0)
}
