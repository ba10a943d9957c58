use heisiso::analysis::{
    compare, iso_ratio, optimize_profile, verify_suite, OptimizerConfig, OptimizerStart, VerifyLevel,
};
use heisiso::canonical::{admissibility, build_a_n, build_a_perturbed, AdmissibilityConfig, BumpSpec};
use heisiso::metric::distance_with;
use heisiso::profile::{h_fn, h_prime, h_second};
use heisiso::sets::{profile_to_sections, Body, SearchConfig, SectionSet};
use heisiso::{DistanceMethod, Exec, Point};

use crate::output::{csv, fmt9, json, read_input, Sink};
use crate::{BumpChoice, CliConfig, Command, Format, Level, Method, StartChoice};

fn exec(cfg: &CliConfig) -> Exec {
    if cfg.threads == Some(1) {
        Exec::Sequential
    } else {
        Exec::Parallel
    }
}

fn encode<T: serde::Serialize>(cfg: &CliConfig, value: &T) -> Result<String, String> {
    match cfg.format {
        Format::Json => json(value),
        Format::Csv => csv(value),
    }
}

fn search(cfg: &CliConfig) -> SearchConfig {
    SearchConfig {
        grid_r: cfg.search.grid_r,
        grid_theta: cfg.search.grid_theta,
        starts: cfg.search.starts,
        nc_samples: cfg.search.nc_samples,
        exec: exec(cfg),
        ..SearchConfig::default()
    }
}

fn load(cfg: &CliConfig, path: Option<&std::path::Path>) -> Result<Body, String> {
    let text = read_input(path)?;
    Body::parse(cfg.n, &text).map_err(|e| e.to_string())
}

fn as_sections(body: Body, zcount: usize) -> Result<SectionSet, String> {
    match body {
        Body::Sections(s) => Ok(s),
        Body::Profile(p) => profile_to_sections(&p, zcount).map_err(|e| e.to_string()),
    }
}

fn point(coords: &[f64]) -> Result<Point, String> {
    Point::from_flat(coords.to_vec()).map_err(|e| e.to_string())
}

/// Returns whether the command succeeded in substance (only `verify` can
/// report `false`).
pub fn run(cfg: &CliConfig) -> Result<bool, String> {
    let sink = Sink::new(cfg.output.clone());
    let err = |e: heisiso::Error| e.to_string();
    match &cfg.command {
        Command::Dist { p, q, method } => {
            let (p, q) = (point(p)?, point(q)?);
            let m = match method {
                Method::Inversion => DistanceMethod::Inversion,
                Method::Bisection => DistanceMethod::Bisection,
            };
            sink.write(&format!("{}\n", fmt9(distance_with(&p, &q, m).map_err(err)?)))?;
        }
        Command::Profile { samples } => {
            if *samples < 2 {
                return Err("--samples must be at least 2".into());
            }
            let mut out = String::from("r,h,h_prime,h_second\n");
            for k in 1..*samples {
                let r = k as f64 / *samples as f64;
                out.push_str(&format!(
                    "{r:.12},{:.12},{:.12},{:.12}\n",
                    h_fn(r).map_err(err)?,
                    h_prime(r).map_err(err)?,
                    h_second(r).map_err(err)?
                ));
            }
            sink.write(&out)?;
        }
        Command::MakeA { lambda, grid } => {
            sink.write(&build_a_n(cfg.n, *lambda, *grid).map_err(err)?.to_csv())?;
        }
        Command::Perturb { lambda, bump, fraction, offset, angle, sign, lipschitz, grid, zcount } => {
            let adm = admissibility(1.0, &AdmissibilityConfig { exec: exec(cfg), ..Default::default() })
                .map_err(err)?;
            let mut bump_shape = match bump {
                BumpChoice::Radial => BumpSpec::radial(cfg.n, *lambda, &adm, *fraction, *sign),
                BumpChoice::Offcenter => BumpSpec::offcenter(cfg.n, *lambda, &adm, *offset, *angle, *sign),
            };
            if let Some(l) = lipschitz {
                bump_shape.lipschitz = *l;
                bump_shape.amplitude = sign.signum() * l * bump_shape.support_radius;
            }
            let set = build_a_perturbed(*lambda, &bump_shape, &adm, *grid, *zcount).map_err(err)?;
            sink.write(&set.to_json())?;
        }
        Command::Volume { input } => {
            let body = load(cfg, input.as_deref())?;
            sink.write(&format!("{}\n", fmt9(body.volume())))?;
        }
        Command::Diameter { input } => {
            let body = load(cfg, input.as_deref())?;
            sink.write(&encode(cfg, &body.diameter(&search(cfg)).map_err(err)?)?)?;
        }
        Command::Nc { input, diam_hint } => {
            let body = load(cfg, input.as_deref())?;
            sink.write(&encode(cfg, &body.nc_check(*diam_hint, &search(cfg)).map_err(err)?)?)?;
        }
        Command::Symmetrize { input, zcount } => match load(cfg, input.as_deref())? {
            // Profile bodies are their own symmetrization.
            Body::Profile(p) => sink.write(&p.to_csv())?,
            body => sink.write(&as_sections(body, *zcount)?.steiner_symmetrize().to_json())?,
        },
        Command::Tco { input, zcount } => match load(cfg, input.as_deref())? {
            Body::Profile(p) => sink.write(&p.to_csv())?,
            body => sink.write(&as_sections(body, *zcount)?.t_convex_hull().to_json())?,
        },
        Command::Ratio { input } => {
            let body = load(cfg, input.as_deref())?;
            sink.write(&encode(cfg, &iso_ratio(&body, &search(cfg)).map_err(err)?)?)?;
        }
        Command::Compare { a, b, tolerance } => {
            let (a, b) = (load(cfg, Some(a))?, load(cfg, Some(b))?);
            sink.write(&encode(cfg, &compare(&a, &b, &search(cfg), *tolerance).map_err(err)?)?)?;
        }
        Command::Optimize { m, max_sweeps, step_tol, diameter, start, profile_out } => {
            let ocfg = OptimizerConfig {
                m: *m,
                max_sweeps: *max_sweeps,
                step_tol: *step_tol,
                diameter_budget: *diameter,
                start: match start {
                    StartChoice::Ball => OptimizerStart::Ball,
                    StartChoice::A => OptimizerStart::A,
                },
                exec: exec(cfg),
                ..OptimizerConfig::default()
            };
            let res = optimize_profile(&ocfg).map_err(err)?;
            if let (Some(path), Some(p)) = (profile_out, &res.profile) {
                Sink::new(Some(path.clone())).write(&p.to_csv())?;
            }
            sink.write(&encode(cfg, &res)?)?;
        }
        Command::Verify { level } => {
            let level = match level {
                Level::Fast => VerifyLevel::Fast,
                Level::Full => VerifyLevel::Full,
            };
            let report = verify_suite(level, cfg.seed, exec(cfg));
            sink.write(&encode(cfg, &report)?)?;
            return Ok(report.all_pass);
        }
        Command::CrossSection { input } => match load(cfg, input.as_deref())? {
            Body::Profile(p) => {
                let mut out = String::from("r,u,minus_u\n");
                for (r, u) in p.radii().iter().zip(p.heights()) {
                    out.push_str(&format!("{},{},{}\n", fmt9(*r), fmt9(*u), fmt9(-*u)));
                }
                sink.write(&out)?;
            }
            Body::Sections(s) => {
                let mut rows: Vec<(f64, f64, f64)> = s
                    .zsamples()
                    .iter()
                    .zip(s.sections())
                    .filter(|(z, secs)| !secs.is_empty() && z.iter().skip(1).all(|v| v.abs() < 1e-12))
                    .map(|(z, secs)| (z[0], secs[0][0], secs[secs.len() - 1][1]))
                    .collect();
                rows.sort_by(|a, b| a.0.total_cmp(&b.0));
                let mut out = String::from("x,t_lo,t_hi\n");
                for (x, lo, hi) in rows {
                    out.push_str(&format!("{},{},{}\n", fmt9(x), fmt9(lo), fmt9(hi)));
                }
                sink.write(&out)?;
            }
        },
    }
    Ok(true)
}
