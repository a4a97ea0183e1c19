use dirac_shell::eigenfunction::{RadialEigenfunction, RadialGrid};
use dirac_shell::spectrum::solve_eigenvalue;
use dirac_shell::{CircleConfig, CouplingPair, Wide};

use crate::args::{EigenfunctionArgs, EigenfunctionFigure};
use crate::error::{CliError, CliResult};
use crate::output::{self, format_f64, Cell, Manifest, Table};

const COLUMNS: [&str; 7] = ["k", "r", "u_re", "u_im", "v_re", "v_im", "density"];
const NORM_TOL: f64 = 1e-8;

/// Scientific notation that also covers magnitudes outside the f64 range;
/// those carry about 13 significant digits.
pub fn format_wide(w: Wide) -> String {
    let x = w.to_f64();
    if w.is_zero() || (x.is_normal() && x.abs() < f64::MAX) {
        return format_f64(x);
    }
    let l = w.ln_abs() / std::f64::consts::LN_10;
    let mut e = l.floor();
    let mut mant = 10f64.powf(l - e);
    if mant >= 10.0 {
        mant /= 10.0;
        e += 1.0;
    }
    format!("{:.12}e{}", w.signum() * mant, e as i64)
}

/// Cell midpoints of [lo, hi], so R is hit only if it sits exactly on one.
fn radii(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|j| lo + (hi - lo) * (j as f64 + 0.5) / n as f64)
        .collect()
}

pub fn run(args: &EigenfunctionArgs) -> CliResult<()> {
    let (mut manifest, config, ks) = match args.figure {
        Some(EigenfunctionFigure::Modu) => (
            Manifest::new("eigenfunction")
                .preset("modu", "|psi_k|^2 of normalized eigenfunctions against r for k = 5, 10, 20, m = R = 1, tau = 0"),
            CircleConfig::new(1.0, 1.0, CouplingPair::new(2.0, 0.0)?)?,
            if args.k.is_empty() { vec![5, 10, 20] } else { args.k.clone() },
        ),
        Some(EigenfunctionFigure::L2t) => (
            Manifest::new("eigenfunction")
                .preset("l2t", "|psi_k|^2 for k = 0 and k = 2 with eta = 2 sqrt(2), tau = -2, m = R = 1"),
            CircleConfig::new(1.0, 1.0, CouplingPair::new(8f64.sqrt(), -2.0)?)?,
            if args.k.is_empty() { vec![0, 2] } else { args.k.clone() },
        ),
        None => {
            if args.k.is_empty() {
                return Err(CliError::Invalid("--k is required without --figure".into()));
            }
            let config = CircleConfig::new(args.m, args.radius, args.coupling.resolve()?)?;
            (Manifest::new("eigenfunction"), config, args.k.clone())
        }
    };
    let r_max = args.r_max.unwrap_or(3.0 * config.radius);
    if !(args.r_min >= 0.0 && r_max > args.r_min && r_max.is_finite() && args.nr > 0) {
        return Err(CliError::Invalid(format!(
            "radial grid [{}, {r_max}] with {} points",
            args.r_min, args.nr
        )));
    }
    if !(args.tol >= 1e-14) {
        return Err(CliError::Invalid(format!("--tol {} below 1e-14", args.tol)));
    }
    let rs = radii(args.r_min, r_max, args.nr);
    if rs.contains(&config.radius) {
        return Err(CliError::Invalid(
            "a grid radius coincides with R; change --nr or the range".into(),
        ));
    }
    manifest.set("m", config.mass);
    manifest.set("R", config.radius);
    manifest.set("coupling", config.coupling);
    manifest.set("k", &ks);
    manifest.set("r_grid", serde_json::json!({"min": args.r_min, "max": r_max, "points": args.nr, "nodes": "midpoints"}));
    manifest.set("tol", args.tol);
    manifest.set(
        "norm_quadrature",
        "Gauss-Legendre, 64 nodes per panel, 12 graded panels per side",
    );

    let mut table = Table::new(manifest, &COLUMNS);
    let mut failed = 0;
    for &k in &ks {
        let state = solve_eigenvalue(&config, k, args.tol)
            .and_then(|r| RadialEigenfunction::new(&config, k, r.z));
        let e = match state {
            Ok(e) => e,
            Err(err) => {
                table.note(&format!("state k={k}"), format!("failed: {err}"));
                failed += 1;
                continue;
            }
        };
        let (bc, obs) = match (
            e.boundary_residual(),
            e.observables(&RadialGrid::for_state(&e)),
        ) {
            (Ok(b), Ok(o)) => (b, o),
            (Err(err), _) | (_, Err(err)) => {
                table.note(&format!("state k={k}"), format!("failed: {err}"));
                failed += 1;
                continue;
            }
        };
        let norm_ok = (obs.norm - 1.0).abs() <= NORM_TOL;
        table.note(
            &format!("state k={k}"),
            format!(
                "z={} c_k={} a_k={} res_u={} res_v={} norm={} norm_check={} sigma3={} v_theta={} v_r={}",
                format_f64(e.z),
                format_wide(e.matching),
                format_wide(e.norm),
                format_f64(bc.res_u),
                format_f64(bc.res_v),
                format_f64(obs.norm),
                if norm_ok { "pass" } else { "fail" },
                format_f64(obs.sigma3),
                format_f64(obs.v_theta),
                format_f64(obs.v_r),
            ),
        );
        if !norm_ok {
            failed += 1;
        }
        for &r in &rs {
            let (u, v) = e.radial_components(r)?;
            let density = e.density(r)?;
            table.push(vec![
                k.into(),
                r.into(),
                u.re.into(),
                u.im.into(),
                v.re.into(),
                v.im.into(),
                Cell::Num(density),
            ]);
        }
    }
    output::emit(
        &table.render(args.output.format)?,
        args.output.out.as_deref(),
    )?;
    if failed > 0 {
        return Err(CliError::Solver {
            failed,
            total: ks.len(),
        });
    }
    Ok(())
}
