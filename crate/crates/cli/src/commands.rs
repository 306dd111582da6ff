use std::fs::{self, File};
use std::io::BufWriter;
use std::path::Path;

use serde::Serialize;
use sparse_nearfield::beamforming::{
    eca_hybrid_two_phase, fully_digital_fp, lsa_hybrid_ao, power_check, sinr_and_rate, write_matrix_csv, FpOptions,
    AoOptions, RateReport, User, UserSet,
};
use sparse_nearfield::beampattern::{beam_pattern_grid, g_kernel, FocusedPattern, GridSpec};
use sparse_nearfield::channel::channel;
use sparse_nearfield::geometry::build_array;
use sparse_nearfield::lobes::{measure_lobes, predict_lobes, write_lobes_csv, MeasureConfig};
use sparse_nearfield::sim::{
    run_curve, sidecar_path, write_curve_csv, write_sidecar, write_trials_csv, HybridDesigner, ScenarioConfig, Sidecar,
    DIGITAL_DESIGNER,
};
use sparse_nearfield::units::{db_to_linear, dbm_to_watts};
use sparse_nearfield::{Error, PolarLocation, Result};

use crate::args::{BeamformArgs, Command, Focus, GfuncArgs, Layout, LobesArgs, PatternArgs, ScenarioArgs};
use crate::Status;

pub fn run(command: Command) -> Result<Status> {
    match command {
        Command::Pattern(a) => pattern(&a),
        Command::Lobes(a) => lobes(&a),
        Command::Beamform(a) => beamform(&a),
        Command::Scenario(a) => scenario(&a),
        Command::Gfunc(a) => gfunc(&a),
    }
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    Ok(BufWriter::new(File::create(path)?))
}

fn sidecar<C: Serialize>(out: &Path, command: &str, seed: Option<u64>, config: &C) -> Result<()> {
    write_sidecar(&sidecar_path(out), &Sidecar::new(command, seed, config)?)
}

fn focus_location(f: &Focus) -> Result<PolarLocation> {
    match (f.focus_deg, f.focus_sin) {
        (Some(deg), None) => PolarLocation::from_degrees(f.focus_range, deg),
        (None, Some(s)) => PolarLocation::from_sine(f.focus_range, s),
        (None, None) => PolarLocation::from_degrees(f.focus_range, 0.0),
        (Some(_), Some(_)) => Err(Error::Config("give either --focus-deg or --focus-sin".into())),
    }
}

fn pattern(a: &PatternArgs) -> Result<Status> {
    let g = build_array(a.focus.array, a.focus.wavelength)?;
    let focus = focus_location(&a.focus)?;
    let spec = GridSpec {
        sin_theta: a.sin.samples(),
        range: a.range.samples(),
    };
    let grid = beam_pattern_grid(&g, focus, &spec, a.mode.into())?;
    let w = create(&a.out)?;
    match a.layout {
        Layout::Wide => grid.write_wide_csv(w)?,
        Layout::Long => grid.write_long_csv(w)?,
    }
    sidecar(&a.out, "pattern", None, a)?;
    eprintln!("{}: {}x{} grid, max {:.6}", a.focus.array.label(), spec.range.len(), spec.sin_theta.len(), grid.max());
    Ok(Status::Ok)
}

fn lobes(a: &LobesArgs) -> Result<Status> {
    let g = build_array(a.focus.array, a.focus.wavelength)?;
    let focus = focus_location(&a.focus)?;
    let predicted = predict_lobes(&g, focus)?;
    let report = if a.measure {
        let evaluator = FocusedPattern::new(&g, focus, a.mode.into());
        Some(measure_lobes(&evaluator, focus, &g, &MeasureConfig::default())?)
    } else {
        None
    };
    write_lobes_csv(create(&a.out)?, &predicted, report.as_ref())?;
    sidecar(&a.out, "lobes", None, a)?;
    eprintln!(
        "{}: {} predicted lobes, {} measured peaks",
        a.focus.array.label(),
        predicted.len(),
        report.as_ref().map_or(0, |r| r.lobes.len())
    );
    Ok(Status::Ok)
}

#[derive(Serialize)]
struct UserRow<'a> {
    designer: &'a str,
    user: usize,
    range_m: f64,
    angle_deg: f64,
    sinr: f64,
    rate: f64,
    converged: bool,
}

fn beamform(a: &BeamformArgs) -> Result<Status> {
    let g = build_array(a.array, a.wavelength)?;
    let beta0 = db_to_linear(a.beta0_db);
    let noise = dbm_to_watts(a.noise_dbm);
    let p_max = dbm_to_watts(a.p_max_dbm);
    let users = UserSet::new(
        a.users
            .iter()
            .map(|u| {
                Ok(User {
                    channel: channel(&g, PolarLocation::from_degrees(u.range_m, u.angle_deg)?, beta0),
                    weight: 1.0,
                    noise_power: noise,
                })
            })
            .collect::<Result<_>>()?,
    )?;
    let fp = FpOptions::default();
    let digital = fully_digital_fp(&users, p_max, &fp)?;
    let designer = HybridDesigner::for_array(a.array);
    let (pair, hybrid_converged) = match designer {
        HybridDesigner::Ao => (lsa_hybrid_ao(&digital.precoder, p_max, &AoOptions::default())?.pair, digital.converged),
        HybridDesigner::TwoPhase => {
            let tp = eca_hybrid_two_phase(&users, p_max, &fp)?;
            (tp.pair, tp.fp.converged)
        }
    };
    let hybrid = sinr_and_rate(&users, &pair)?;
    if !power_check(&pair).is_ok() {
        eprintln!("warning: hybrid precoder exceeds the power budget");
    }

    let mut w = csv::Writer::from_writer(create(&a.out)?);
    let mut emit = |name: &str, report: &RateReport, converged: bool| -> Result<()> {
        for (i, u) in a.users.iter().enumerate() {
            w.serialize(UserRow {
                designer: name,
                user: i,
                range_m: u.range_m,
                angle_deg: u.angle_deg,
                sinr: report.sinr[i],
                rate: report.rate[i],
                converged,
            })?;
        }
        Ok(())
    };
    emit(DIGITAL_DESIGNER, &digital.report, digital.converged)?;
    emit(designer.name(), &hybrid, hybrid_converged)?;
    w.flush()?;

    if let Some(dir) = &a.matrices {
        fs::create_dir_all(dir)?;
        write_matrix_csv(create(&dir.join("digital_fp.csv"))?, &digital.precoder)?;
        write_matrix_csv(create(&dir.join("analog.csv"))?, &pair.analog)?;
        write_matrix_csv(create(&dir.join("digital.csv"))?, &pair.digital)?;
    }
    sidecar(&a.out, "beamform", None, a)?;
    eprintln!(
        "{}: digital {:.4} bit/s/Hz, {} {:.4} bit/s/Hz",
        a.array.label(),
        digital.report.weighted_sum_rate,
        designer.name(),
        hybrid.weighted_sum_rate
    );
    let converged = digital.converged && hybrid_converged;
    Ok(if a.strict && !converged { Status::NotConverged } else { Status::Ok })
}

/// Preset or file, then command-line overrides.
pub fn resolve_scenario(a: &ScenarioArgs) -> Result<ScenarioConfig> {
    let mut c = match (&a.config, a.preset) {
        (Some(path), _) => {
            let text = fs::read_to_string(path)?;
            serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?
        }
        (None, Some(p)) => ScenarioConfig::preset(p)?,
        (None, None) => return Err(Error::Config("give --preset or --config".into())),
    };
    if let Some(v) = a.trials {
        c.trials = v;
    }
    if let Some(v) = a.seed {
        c.seed = v;
    }
    if let Some(v) = a.users {
        c.users = v;
    }
    if let Some(v) = a.p_max_dbm {
        c.p_max_dbm = v;
    }
    if let Some(v) = a.noise_dbm {
        c.noise_dbm = v;
    }
    if a.no_digital {
        c.include_digital = false;
    }
    c.validate()?;
    Ok(c)
}

fn scenario(a: &ScenarioArgs) -> Result<Status> {
    let c = resolve_scenario(a)?;
    if a.dump_config {
        println!("{}", serde_json::to_string_pretty(&c)?);
        return Ok(Status::Ok);
    }
    let out = a.out.as_deref().ok_or_else(|| Error::Config("--out is required".into()))?;
    let res = run_curve(&c)?;
    write_curve_csv(create(out)?, &res)?;
    if let Some(path) = &a.trials_out {
        write_trials_csv(create(path)?, &res)?;
    }
    sidecar(out, "scenario", Some(c.seed), &c)?;
    for r in &res.rows {
        eprintln!(
            "{}={:<6} {:<22} {:<17} {:8.3} ± {:.3}",
            res.x_axis, r.x, r.array, r.designer, r.mean_rate, r.std_rate
        );
    }
    let nc = res.nonconverged();
    if nc > 0 {
        eprintln!("{nc} designer runs stopped at the FP iteration cap");
    }
    Ok(if a.strict && nc > 0 { Status::NotConverged } else { Status::Ok })
}

fn gfunc(a: &GfuncArgs) -> Result<Status> {
    let mut w = csv::Writer::from_writer(create(&a.out)?);
    w.write_record(["beta1", "beta2", "g_abs", "g_re", "g_im"])?;
    for b1 in a.beta1.samples() {
        for b2 in a.beta2.samples() {
            let v = g_kernel(b1, b2);
            w.write_record([b1, b2, v.norm(), v.re, v.im].map(|x| x.to_string()))?;
        }
    }
    w.flush()?;
    sidecar(&a.out, "gfunc", None, a)?;
    Ok(Status::Ok)
}
