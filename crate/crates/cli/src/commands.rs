use std::path::Path;

use nalgebra::DMatrix;

use hsp_core::experiment::{aggregate, format_mean_sd, run_on, run_replications, simulate, ReplicationResult};
use hsp_core::repro::{run_repro_suite, standard_cases};
use hsp_core::simgen::SimulatedData;
use hsp_core::standardize::Standardization;
use hsp_core::summary::{autocorrelation, credible_interval, interval_selects, summarize, Acf};
use hsp_core::{fit, Dataset, Param, PosteriorDraws};

use crate::config::{Format, RunConfig};
use crate::error::{CliError, Result};
use crate::io::{read_matrix, read_response, write_matrix, write_response};
use crate::output::{write_json, write_text, Cell, Table};

pub const ACF_MAX_LAG: usize = 50;

/// Column names used to label parameters in the outputs.
#[derive(Debug, Clone, PartialEq)]
pub struct Names {
    pub x: Vec<String>,
    pub z: Vec<String>,
}

impl Names {
    pub fn generic(p: usize, q: usize) -> Self {
        Self {
            x: (1..=p).map(|j| format!("x{j}")).collect(),
            z: (1..=q).map(|k| format!("z{k}")).collect(),
        }
    }

    pub fn label(&self, param: Param) -> String {
        match param {
            Param::Beta0 => "(Intercept)".into(),
            Param::Theta0(k) => self.z[k].clone(),
            Param::Beta(j) => self.x[j].clone(),
            Param::Theta(j, k) => format!("{}:{}", self.x[j], self.z[k]),
            Param::LambdaSq(j) => format!("lambda_sq:{}", self.x[j]),
            Param::TauSq => "tau_sq".into(),
            Param::SigmaSq => "sigma_sq".into(),
        }
    }
}

fn ensure_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))
}

/// Reads the fit inputs into a dataset.
pub fn load_dataset(cfg: &RunConfig) -> Result<(Dataset, Names)> {
    let inputs = cfg
        .inputs
        .as_ref()
        .ok_or_else(|| CliError::Config("fit needs -x and -y".into()))?;
    let (x_names, x) = read_matrix(&inputs.x)?;
    let (z_names, z) = match &inputs.z {
        Some(path) => read_matrix(path)?,
        None => (Vec::new(), DMatrix::zeros(x.nrows(), 0)),
    };
    let (_, y, missing) = read_response(&inputs.y)?;
    if z.nrows() != x.nrows() || y.len() != x.nrows() {
        return Err(CliError::Dimension(format!(
            "X has {} rows, Z has {} and y has {}",
            x.nrows(),
            z.nrows(),
            y.len()
        )));
    }
    let data = Dataset::new(x, z, y, missing, cfg.family)?;
    Ok((data, Names { x: x_names, z: z_names }))
}

/// Fits on the original or the standardized design; draws come back on the
/// original scale either way.
pub fn fit_dataset(cfg: &RunConfig, data: &Dataset) -> Result<PosteriorDraws> {
    if cfg.standardize {
        let st = Standardization::from_data(data);
        let mut draws = fit(&st.apply(data)?, &cfg.sampler, &cfg.hyper)?;
        st.back_transform_draws(&mut draws);
        Ok(draws)
    } else {
        Ok(fit(data, &cfg.sampler, &cfg.hyper)?)
    }
}

pub fn summary_table(draws: &PosteriorDraws, names: &Names) -> Result<Table> {
    let mut t = Table::new(&["param", "label", "mean", "sd", "median"]);
    for s in summarize(draws, &draws.all_params())? {
        t.push(vec![
            s.param.to_string().into(),
            names.label(s.param).into(),
            s.mean.into(),
            s.sd.into(),
            s.median.into(),
        ]);
    }
    Ok(t)
}

pub fn intervals_table(draws: &PosteriorDraws, names: &Names) -> Result<Table> {
    let mut t = Table::new(&["param", "label", "level", "lower", "upper"]);
    for param in draws.coefficient_params() {
        for level in [0.95, 0.90] {
            let ci = credible_interval(draws, param, level)?;
            t.push(vec![
                param.to_string().into(),
                names.label(param).into(),
                level.into(),
                ci.lower.into(),
                ci.upper.into(),
            ]);
        }
    }
    Ok(t)
}

/// Predictor coefficients with their interval at `level` and whether it
/// excludes zero.
pub fn selection_table(draws: &PosteriorDraws, names: &Names, level: f64) -> Result<Table> {
    let mut t = Table::new(&["param", "label", "level", "mean", "lower", "upper", "selected"]);
    let params = draws
        .coefficient_params()
        .into_iter()
        .filter(|p| matches!(p, Param::Beta(_) | Param::Theta(..)));
    for param in params {
        let chain = draws.chain(param).expect("known parameter");
        let ci = credible_interval(draws, param, level)?;
        t.push(vec![
            param.to_string().into(),
            names.label(param).into(),
            level.into(),
            hsp_core::summary::mean(chain).into(),
            ci.lower.into(),
            ci.upper.into(),
            interval_selects(chain, level)?.into(),
        ]);
    }
    Ok(t)
}

/// Human-readable effects table: `mean (lower; upper)` per coefficient.
pub fn effects_markdown(draws: &PosteriorDraws, names: &Names, level: f64) -> Result<String> {
    let pct = (level * 100.0).round();
    let mut out = format!("| term | estimate ({pct}% CI) | selected |\n|---|---|---|\n");
    for param in draws.coefficient_params() {
        let chain = draws.chain(param).expect("known parameter");
        let ci = credible_interval(draws, param, level)?;
        out.push_str(&format!(
            "| {} | {:.3} ({:.3}; {:.3}) | {} |\n",
            names.label(param),
            hsp_core::summary::mean(chain),
            ci.lower,
            ci.upper,
            if interval_selects(chain, level)? { "yes" } else { "no" }
        ));
    }
    Ok(out)
}

pub fn acf_table(draws: &PosteriorDraws, names: &Names) -> Result<Table> {
    let mut t = Table::new(&["param", "label", "lag", "acf"]);
    let mut params = draws.coefficient_params();
    params.push(Param::TauSq);
    if draws.sigma_sq.is_some() {
        params.push(Param::SigmaSq);
    }
    for param in params {
        match autocorrelation(draws, param, ACF_MAX_LAG)? {
            Acf::Values(v) => {
                for (lag, a) in v.into_iter().enumerate() {
                    t.push(vec![param.to_string().into(), names.label(param).into(), lag.into(), a.into()]);
                }
            }
            Acf::Degenerate => {
                t.push(vec![param.to_string().into(), names.label(param).into(), 0usize.into(), Cell::Missing]);
            }
        }
    }
    Ok(t)
}

/// One row per stored draw; `full` adds every coefficient and scale.
pub fn draws_table(draws: &PosteriorDraws, full: bool) -> Table {
    let params: Vec<Param> = if full {
        draws.all_params()
    } else {
        let mut v = vec![Param::Beta0];
        v.extend((0..draws.p).map(Param::Beta));
        v.push(Param::TauSq);
        if draws.sigma_sq.is_some() {
            v.push(Param::SigmaSq);
        }
        v
    };
    let mut header = vec!["draw".to_string()];
    header.extend(params.iter().map(|p| p.to_string()));
    let chains: Vec<&[f64]> = params.iter().map(|&p| draws.chain(p).expect("known parameter")).collect();
    let mut t = Table { header, rows: Vec::with_capacity(draws.n_stored) };
    for s in 0..draws.n_stored {
        let mut row: Vec<Cell> = vec![(s + 1).into()];
        row.extend(chains.iter().map(|c| Cell::Num(c[s])));
        t.rows.push(row);
    }
    t
}

pub fn imputed_table(draws: &PosteriorDraws) -> Result<Option<Table>> {
    let Some(imp) = &draws.imputed else { return Ok(None) };
    let ns = draws.n_stored;
    let mut t = Table::new(&["row", "mean", "lower95", "upper95"]);
    for (m, &i) in imp.indices.iter().enumerate() {
        let chain = &imp.values[m * ns..(m + 1) * ns];
        let ci = hsp_core::summary::interval_of(chain, 0.95)?;
        t.push(vec![(i + 1).into(), hsp_core::summary::mean(chain).into(), ci.lower.into(), ci.upper.into()]);
    }
    Ok(Some(t))
}

pub fn run_info_table(cfg: &RunConfig, data: &Dataset, draws: &PosteriorDraws) -> Table {
    let mut t = Table::new(&["key", "value"]);
    let mut add = |k: &str, v: Cell| t.push(vec![k.into(), v]);
    add("family", data.family().to_string().into());
    add("n", data.n().into());
    add("p", data.p().into());
    add("q", data.q().into());
    add("n_iter", cfg.sampler.n_iter.into());
    add("burn_in", cfg.sampler.burn_in.into());
    add("thin", cfg.sampler.thin.into());
    add("seed", cfg.sampler.seed.into());
    add("pliable", cfg.sampler.pliable.into());
    add("standardized", cfg.standardize.into());
    add("level", cfg.level.into());
    add("n_stored", draws.n_stored.into());
    add("n_imputed", data.n_missing().into());
    add("max_drift", draws.diagnostics.max_drift.into());
    add("refreshes", draws.diagnostics.refreshes.into());
    t
}

/// Writes the full set of per-fit outputs into `dir`.
pub fn write_fit_outputs(cfg: &RunConfig, dir: &Path, data: &Dataset, names: &Names, draws: &PosteriorDraws) -> Result<()> {
    ensure_dir(dir)?;
    let f = &cfg.formats;
    summary_table(draws, names)?.write(dir, "summary", f)?;
    intervals_table(draws, names)?.write(dir, "intervals", f)?;
    selection_table(draws, names, cfg.level)?.write(dir, "selection", f)?;
    run_info_table(cfg, data, draws).write(dir, "run_info", f)?;
    acf_table(draws, names)?.write(dir, "acf", f)?;
    draws_table(draws, false).write(dir, "trace", &[Format::Csv])?;
    if cfg.store_draws {
        draws_table(draws, true).write(dir, "draws", &[Format::Csv])?;
    }
    if let Some(t) = imputed_table(draws)? {
        t.write(dir, "imputed", f)?;
    }
    write_text(&dir.join("effects.md"), &effects_markdown(draws, names, cfg.level)?)
}

pub fn cmd_fit(cfg: &RunConfig) -> Result<()> {
    let (data, names) = load_dataset(cfg)?;
    let draws = fit_dataset(cfg, &data)?;
    write_fit_outputs(cfg, &cfg.out, &data, &names, &draws)?;
    println!(
        "fit {} model: n={} p={} q={}, {} draws stored, {} responses imputed -> {}",
        data.family(),
        data.n(),
        data.p(),
        data.q(),
        draws.n_stored,
        data.n_missing(),
        cfg.out.display()
    );
    Ok(())
}

pub fn metrics_table(results: &[ReplicationResult]) -> Table {
    let mut t = Table::new(&[
        "rep", "n_missing", "est_beta", "est_theta", "pred", "accuracy", "fdr", "fpr", "tp", "fp", "fn", "tn",
    ]);
    for r in results {
        let m = &r.metrics;
        t.push(vec![
            r.rep.into(),
            r.n_missing.into(),
            m.est_beta.into(),
            m.est_theta.into(),
            m.pred.into(),
            m.accuracy.into(),
            m.fdr.into(),
            m.fpr.into(),
            m.tp.into(),
            m.fp.into(),
            m.fn_.into(),
            m.tn.into(),
        ]);
    }
    t
}

pub fn truth_table(sim: &SimulatedData, names: &Names) -> Table {
    let c = &sim.truth.coefficients;
    let mut t = Table::new(&["param", "label", "value"]);
    let mut add = |param: Param, v: f64| t.push(vec![param.to_string().into(), names.label(param).into(), v.into()]);
    add(Param::Beta0, c.beta0);
    for (k, &v) in c.theta0.iter().enumerate() {
        add(Param::Theta0(k), v);
    }
    for (j, &v) in c.beta.iter().enumerate() {
        add(Param::Beta(j), v);
    }
    for j in 0..c.p() {
        for (k, &v) in c.theta_row(j).iter().enumerate() {
            add(Param::Theta(j, k), v);
        }
    }
    t
}

pub fn write_dataset(dir: &Path, prefix: &str, data: &Dataset, names: &Names) -> Result<()> {
    write_matrix(&dir.join(format!("X{prefix}.csv")), &names.x, data.x())?;
    write_matrix(&dir.join(format!("Z{prefix}.csv")), &names.z, data.z())?;
    write_response(&dir.join(format!("y{prefix}.csv")), "y", data.y(), data.missing())
}

pub fn cmd_simulate(cfg: &RunConfig) -> Result<()> {
    ensure_dir(&cfg.out)?;
    let exp = cfg.experiment();
    let sim = simulate(&exp, 0)?;
    let names = Names::generic(sim.train.p(), sim.train.q());
    write_dataset(&cfg.out, "", &sim.train, &names)?;
    write_dataset(&cfg.out, "_test", &sim.test, &names)?;
    truth_table(&sim, &names).write(&cfg.out, "truth", &cfg.formats)?;
    let (draws, result) = run_on(&exp, &sim, 0)?;
    metrics_table(std::slice::from_ref(&result)).write(&cfg.out, "metrics", &cfg.formats)?;
    write_fit_outputs(cfg, &cfg.out.join("fit"), &sim.train, &names, &draws)?;
    let m = &result.metrics;
    println!(
        "setting {} n={} missing={}: Est(beta)={:.4} Est(theta)={:.4} Pred={:.4} accuracy={:.2}",
        cfg.spec.setting, cfg.spec.n, result.n_missing, m.est_beta, m.est_theta, m.pred, m.accuracy
    );
    Ok(())
}

pub fn aggregate_table(results: &[ReplicationResult]) -> Table {
    let mut t = Table::new(&["metric", "mean", "sd", "median", "formatted"]);
    for a in aggregate(results) {
        t.push(vec![
            a.metric.as_str().into(),
            a.mean.into(),
            a.sd.into(),
            a.median.into(),
            format_mean_sd(&a).into(),
        ]);
    }
    t
}

pub fn cmd_benchmark(cfg: &RunConfig) -> Result<()> {
    ensure_dir(&cfg.out)?;
    let results = run_replications(&cfg.experiment(), cfg.reps)?;
    metrics_table(&results).write(&cfg.out, "metrics", &cfg.formats)?;
    let agg = aggregate_table(&results);
    agg.write(&cfg.out, "aggregate", &cfg.formats)?;
    println!("setting {} n={} p={} reps={}", cfg.spec.setting, cfg.spec.n, cfg.spec.p, cfg.reps);
    for a in aggregate(&results) {
        println!("  {:<10} {}", a.metric, format_mean_sd(&a));
    }
    Ok(())
}

pub fn cmd_repro(cfg: &RunConfig) -> Result<()> {
    ensure_dir(&cfg.out)?;
    let mut cases = standard_cases();
    if !cfg.cases.is_empty() {
        cases.retain(|c| cfg.cases.contains(&c.name));
        if cases.is_empty() {
            return Err(CliError::Config(format!("no reproduction case named {:?}", cfg.cases)));
        }
    }
    if let Some(reps) = cfg.reps_explicit {
        cases.iter_mut().for_each(|c| c.reps = reps);
    }
    let report = run_repro_suite(&cases)?;
    let md = report.to_markdown();
    write_text(&cfg.out.join("repro.md"), &md)?;
    if cfg.formats.contains(&Format::Json) {
        let value = serde_json::to_value(&report).map_err(|e| CliError::Config(e.to_string()))?;
        write_json(&cfg.out.join("repro.json"), &value)?;
    }
    print!("{md}");
    Ok(())
}

