use dirac_shell::spectrum::{self, asymptotic_eigenvalue, EigenvalueRecord, RESIDUAL_TOL};
use dirac_shell::{CircleConfig, CouplingPair};

use crate::args::{SpectrumArgs, SpectrumFigure};
use crate::error::{CliError, CliResult};
use crate::output::{self, Cell, Manifest, Table};

const COLUMNS: [&str; 10] = [
    "tau",
    "eta",
    "k",
    "z",
    "residual",
    "gap",
    "asymptotic3",
    "deviation",
    "roots",
    "status",
];

fn record_row(config: &CircleConfig, r: &EigenvalueRecord) -> Vec<Cell> {
    let asym = if r.k != 0 && config.coupling.critical {
        asymptotic_eigenvalue(config, r.k, 3).ok()
    } else {
        None
    };
    let status = if r.is_anomalous() {
        "multiple roots"
    } else if r.residual.abs() > RESIDUAL_TOL {
        "residual above tolerance"
    } else {
        "ok"
    };
    vec![
        config.coupling.tau.into(),
        config.coupling.eta.into(),
        r.k.into(),
        r.z.into(),
        r.residual.into(),
        r.gap.into(),
        asym.into(),
        asym.map(|a| r.z - a).into(),
        (r.roots_in_channel as i64).into(),
        status.into(),
    ]
}

fn failure_row(config: &CircleConfig, k: i64, e: &dirac_shell::Error) -> Vec<Cell> {
    let mut row = vec![
        config.coupling.tau.into(),
        config.coupling.eta.into(),
        k.into(),
    ];
    row.extend(std::iter::repeat_n(Cell::Empty, 6));
    row.push(Cell::Text(format!("failed: {e}")));
    row
}

pub fn run(args: &SpectrumArgs) -> CliResult<()> {
    if !(args.tol >= 1e-14) {
        return Err(CliError::Invalid(format!("--tol {} below 1e-14", args.tol)));
    }
    let (mut manifest, configs, k_min, k_max) = match args.figure {
        Some(SpectrumFigure::Ev) => {
            let m = Manifest::new("spectrum").preset(
                "ev",
                "discrete eigenvalues z_k for eta = +sqrt(4 + tau^2), tau = -5, 0, 5, m = R = 1",
            );
            let configs = [-5.0, 0.0, 5.0]
                .iter()
                .map(|&tau| {
                    Ok(CircleConfig::new(
                        1.0,
                        1.0,
                        CouplingPair::from_tau(tau, 1.0)?,
                    )?)
                })
                .collect::<CliResult<Vec<_>>>()?;
            (m, configs, -30, 30)
        }
        None => {
            let (Some(lo), Some(hi)) = (args.k_min, args.k_max) else {
                return Err(CliError::Invalid(
                    "--k-min and --k-max are required without --figure".into(),
                ));
            };
            let config = CircleConfig::new(args.m, args.radius, args.coupling.resolve()?)?;
            (Manifest::new("spectrum"), vec![config], lo, hi)
        }
    };
    if k_min > k_max {
        return Err(CliError::Invalid(format!("empty k-range {k_min}..{k_max}")));
    }
    let first = configs[0];
    manifest.set("m", first.mass);
    manifest.set("R", first.radius);
    manifest.set(
        "couplings",
        configs.iter().map(|c| c.coupling).collect::<Vec<_>>(),
    );
    manifest.set("k_min", k_min);
    manifest.set("k_max", k_max);
    manifest.set("tol", args.tol);
    manifest.set("scan_grid", spectrum::DEFAULT_GRID);

    let mut table = Table::new(manifest, &COLUMNS);
    let (mut failed, mut total) = (0, 0);
    for config in &configs {
        table.note(
            &format!("z_star tau={}", output::format_f64(config.coupling.tau)),
            output::format_f64(config.z_star()),
        );
        if !config.coupling.critical {
            table.note(
                "warning",
                "non-critical coupling; results are diagnostic only",
            );
        }
        let sp = spectrum::spectrum(config, k_min, k_max, args.tol);
        let mut rows: Vec<(i64, Vec<Cell>)> = sp
            .records
            .iter()
            .map(|r| (r.k, record_row(config, r)))
            .collect();
        rows.extend(
            sp.failures
                .iter()
                .map(|(k, e)| (*k, failure_row(config, *k, e))),
        );
        rows.sort_by_key(|r| r.0);
        failed += sp.failures.len();
        total += (k_max - k_min + 1) as usize;
        rows.into_iter().for_each(|(_, row)| table.push(row));
    }
    output::emit(
        &table.render(args.output.format)?,
        args.output.out.as_deref(),
    )?;
    if failed > 0 {
        return Err(CliError::Solver { failed, total });
    }
    Ok(())
}
