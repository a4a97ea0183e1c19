use std::path::Path;
use std::str::FromStr;

use dirac_shell::line::{
    self, FormFactor, LambdaMatrix, LineConfig, LineField, PlaneQuadrature, PsiQuadrature, Side,
};
use dirac_shell::CouplingPair;
use num_complex::Complex64 as C;
use rayon::prelude::*;

use crate::args::{LineArgs, LineFigure};
use crate::checks::statistics_pairs;
use crate::error::{CliError, CliResult};
use crate::output::{self, format_f64, Cell, Manifest, Table};

/// Parses `b<n>`, `hermite:c0,c1,...` or `file:path.csv`.
pub fn parse_form_factor(spec: &str) -> CliResult<FormFactor> {
    if let Some(n) = spec.strip_prefix('b') {
        let n: usize = n
            .parse()
            .map_err(|_| CliError::Invalid(format!("bad Hermite index in --xi {spec}")))?;
        return Ok(FormFactor::hermite(n)?);
    }
    if let Some(list) = spec.strip_prefix("hermite:") {
        let coef = list
            .split(',')
            .map(|s| {
                C::from_str(s.trim())
                    .map_err(|_| CliError::Invalid(format!("bad coefficient {s:?} in --xi")))
            })
            .collect::<CliResult<Vec<_>>>()?;
        return Ok(FormFactor::from_hermite_coefficients(coef)?);
    }
    if let Some(path) = spec.strip_prefix("file:") {
        return read_samples(Path::new(path));
    }
    Err(CliError::Invalid(format!(
        "--xi must be b<n>, hermite:... or file:..., got {spec}"
    )))
}

/// Samples from a CSV file with columns k, re and optionally im. A header row and
/// `#` comment lines are skipped.
fn read_samples(path: &Path) -> CliResult<FormFactor> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .flexible(true)
        .trim(csv::Trim::All)
        .from_path(path)?;
    let (mut grid, mut values) = (Vec::new(), Vec::new());
    for (i, rec) in reader.records().enumerate() {
        let rec = rec?;
        let field = |j: usize| rec.get(j).map(str::parse::<f64>);
        match (field(0), field(1), field(2)) {
            (Some(Ok(k)), Some(Ok(re)), im) => {
                let im = match im {
                    None => 0.0,
                    Some(Ok(v)) => v,
                    Some(Err(_)) => {
                        return Err(CliError::Invalid(format!(
                            "bad imaginary part on line {}",
                            i + 1
                        )))
                    }
                };
                grid.push(k);
                values.push(C::new(re, im));
            }
            _ if i == 0 => continue,
            _ => {
                return Err(CliError::Invalid(format!(
                    "{}: cannot read line {}",
                    path.display(),
                    i + 1
                )))
            }
        }
    }
    Ok(FormFactor::sampled(grid, values)?)
}

fn axis(lo: f64, hi: f64, n: usize) -> CliResult<Vec<f64>> {
    if !(lo.is_finite() && hi.is_finite() && n >= 1 && (hi > lo || (n == 1 && hi == lo))) {
        return Err(CliError::Invalid(format!(
            "bad grid [{lo}, {hi}] with {n} points"
        )));
    }
    Ok(if n == 1 {
        vec![lo]
    } else {
        (0..n)
            .map(|j| lo + (hi - lo) * j as f64 / (n - 1) as f64)
            .collect()
    })
}

/// The general transfer matrix for a non-critical pair; the line model has no
/// bound states there, so this is all that is reported.
fn transfer_table(mut manifest: Manifest, pair: &CouplingPair) -> CliResult<Table> {
    let lambda = LambdaMatrix::general(pair.eta, pair.tau)?;
    manifest.set("coupling", pair);
    let mut table = Table::new(manifest, &["matrix", "row", "col", "re", "im"]);
    table.note(
        "warning",
        "non-critical coupling: no line bound states; transfer matrix only",
    );
    for (name, m) in [("lambda", lambda), ("lambda_squared", lambda.square())] {
        for r in 0..2 {
            for c in 0..2 {
                let v = m.entries[r][c];
                table.push(vec![
                    name.into(),
                    (r as i64).into(),
                    (c as i64).into(),
                    v.re.into(),
                    v.im.into(),
                ]);
            }
        }
    }
    Ok(table)
}

pub fn run(args: &LineArgs) -> CliResult<()> {
    let (mut manifest, pair, xi, xi_spec) = match args.figure {
        Some(LineFigure::Modplots1) => (
            Manifest::new("line").preset("modplots1", "|psi_Xi(x, y)|^2 for eta = 2, tau = 0, Xi = b_0 = (2/pi)^(1/4) exp(-k^2)"),
            CouplingPair::new(2.0, 0.0)?,
            FormFactor::hermite(0)?,
            "b0".to_string(),
        ),
        Some(LineFigure::Modplots2) => (
            Manifest::new("line").preset(
                "modplots2",
                "|psi_Xi(x, y)|^2 for eta = sqrt(13), tau = -3, Xi = (2/sqrt(5)) (2/pi)^(1/4) (k + 1) exp(-k^2)",
            ),
            CouplingPair::new(13f64.sqrt(), -3.0)?,
            line::tilted_gaussian(),
            format!("hermite:{},{}", 2.0 / 5f64.sqrt(), 1.0 / 5f64.sqrt()),
        ),
        None => (
            Manifest::new("line"),
            args.coupling.resolve()?,
            parse_form_factor(&args.xi)?.with_shift(args.shift_y0),
            args.xi.clone(),
        ),
    };
    if !pair.critical {
        let table = transfer_table(manifest, &pair)?;
        return output::emit(
            &table.render(args.output.format)?,
            args.output.out.as_deref(),
        );
    }
    let config = LineConfig::new(args.m, pair)?;
    manifest.set("m", config.mass);
    manifest.set("coupling", config.coupling);
    manifest.set("xi", xi_spec);
    manifest.set("shift_y0", xi.shift_y0);
    if let Some(path) = args
        .xi
        .strip_prefix("file:")
        .filter(|_| args.figure.is_none())
    {
        manifest.set("xi_sha256", output::sha256_hex(&std::fs::read(path)?));
    }
    manifest.set("xi_norm", xi.norm_sq().sqrt());
    let table = if args.observables {
        observables_table(manifest, &config, &xi)?
    } else {
        density_table(manifest, &config, &xi, args)?
    };
    let (table, failure) = table;
    output::emit(
        &table.render(args.output.format)?,
        args.output.out.as_deref(),
    )?;
    failure.map_or(Ok(()), Err)
}

type Outcome = (Table, Option<CliError>);

fn observables_table(
    mut manifest: Manifest,
    config: &LineConfig,
    xi: &FormFactor,
) -> CliResult<Outcome> {
    let quad = PlaneQuadrature::default();
    manifest.set(
        "plane_quadrature",
        serde_json::json!({
            "x_extent": quad.x_extent, "y_extent": quad.y_extent, "x_levels": quad.x_levels,
            "nodes_per_panel": quad.nodes_per_panel, "y_panel": quad.y_panel, "unit": "|eta|/(2m)"
        }),
    );
    let closed = line::line_observables(config, xi)?;
    let plane = line::plane_moments(config, xi, &quad)?;
    let mut table = Table::new(
        manifest,
        &[
            "observable",
            "statistic",
            "closed_form",
            "quadrature",
            "difference",
        ],
    );
    let norm = xi.norm_sq_quadrature().sqrt();
    table.push(vec![
        "psi".into(),
        "norm".into(),
        norm.into(),
        plane.norm_sq.sqrt().into(),
        (plane.norm_sq.sqrt() - norm).into(),
    ]);
    for (obs, stat, a, b) in statistics_pairs(&closed, &plane.statistics) {
        table.push(vec![
            obs.into(),
            stat.into(),
            a.into(),
            b.into(),
            (b - a).into(),
        ]);
    }
    if closed.y.is_none() {
        table.note(
            "warning",
            "form factor does not vanish at its grid ends; y statistics are undefined",
        );
    }
    Ok((table, None))
}

fn density_table(
    mut manifest: Manifest,
    config: &LineConfig,
    xi: &FormFactor,
    args: &LineArgs,
) -> CliResult<Outcome> {
    let xs = axis(args.x_min, args.x_max, args.nx)?;
    let ys = axis(args.y_min, args.y_max, args.ny)?;
    let quad = PsiQuadrature {
        nodes: args.nodes,
        tolerance: args.quad_tol,
    };
    manifest.set(
        "x_grid",
        serde_json::json!({"min": args.x_min, "max": args.x_max, "points": args.nx}),
    );
    manifest.set(
        "y_grid",
        serde_json::json!({"min": args.y_min, "max": args.y_max, "points": args.ny}),
    );
    manifest.set(
        "k_quadrature",
        serde_json::json!({"min_nodes": quad.nodes, "tolerance": quad.tolerance}),
    );
    manifest.set("x_zero_side", "left");
    let y_max = args.y_min.abs().max(args.y_max.abs());
    let field = LineField::new(config, xi, y_max, &quad)?;
    let values: Vec<Vec<(f64, f64)>> = xs
        .par_iter()
        .map(|&x| {
            ys.iter()
                .map(|&y| {
                    let v = field.evaluate(x, y, Side::Left);
                    (v.density(), v.error)
                })
                .collect()
        })
        .collect();
    let mut table = Table::new(manifest, &["x", "y", "density"]);
    let mut max_error = 0.0f64;
    for (row, &x) in values.iter().zip(&xs) {
        for (&(d, err), &y) in row.iter().zip(&ys) {
            max_error = max_error.max(err);
            table.push(vec![x.into(), y.into(), Cell::Num(d)]);
        }
    }
    table.note("max_quadrature_error", format_f64(max_error));
    let failure = (!(max_error <= quad.tolerance)).then_some(CliError::Core(
        dirac_shell::Error::Quadrature {
            estimate: max_error,
            tolerance: quad.tolerance,
        },
    ));
    Ok((table, failure))
}
