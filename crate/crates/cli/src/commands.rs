use std::fmt::Write as _;
use std::fs;

use anyhow::{Context, Result};
use hocomp_core::algebra::io::algebra_to_string;
use hocomp_core::bar::derived::{derived_circle, tq};
use hocomp_core::bar::{prepare, Bar, BarOptions};
use hocomp_core::chain::homology;
use hocomp_core::completion::verify;
use hocomp_core::pushout::{pushout, relative_circle, PushoutFile};
use hocomp_core::{CompletionTower, HomologyReport, RightModule, Status, Verdict};
use serde::Serialize;

use crate::input::{read, read_complex};
use crate::{cache, Command, Job, SsFormat, Statement};

fn emit(job: &Job, text: &str) -> Result<()> {
    match &job.out {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn json<T: Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("reports serialize") + "\n"
}

#[derive(Serialize)]
struct Certified<'a> {
    object: &'a str,
    exact_through: i32,
    homology: &'a HomologyReport,
}

fn homology_out(job: &Job, object: &str, through: i32, r: &HomologyReport) -> Result<()> {
    if job.json {
        emit(job, &json(&Certified { object, exact_through: through, homology: r }))
    } else {
        emit(job, &format!("# {object}, exact through degree {through}\n{}", r.table()))
    }
}

fn module_name(n: RightModule) -> String {
    match n {
        RightModule::Whole => "O".into(),
        RightModule::Truncation(k) => format!("tau_{k} O"),
        RightModule::Layer(k) => format!("i_{k} O"),
        RightModule::Above(k) => format!("O^>{k}"),
    }
}

/// Homology of a circle product through the cache.
fn cached(job: &Job, key: String, through: i32, compute: impl FnOnce() -> Result<HomologyReport>) -> Result<HomologyReport> {
    let (lo, _) = job.window;
    if let Some(r) = cache::get(&key) {
        return Ok(r);
    }
    let r = compute()?.window(lo, through);
    cache::put(&key, &r);
    Ok(r)
}

fn key(job: &Job, what: &str, algebra: &str) -> String {
    format!("{what}|{:?}|{:?}|{:?}|{}", job.window, job.params().levels, job.cutoff, algebra)
}

fn verdict(job: &Job, v: Verdict) -> Result<bool> {
    emit(job, &(v.to_json() + "\n"))?;
    Ok(v.status != Status::Fail)
}

/// Runs one command; `Ok(false)` reports a fail verdict.
pub fn run(cmd: Command) -> Result<bool> {
    match cmd {
        Command::Homology { file, job } => {
            let c = read_complex(&file)?;
            let r = homology(&c).window(job.window.0, job.window.1);
            homology_out(&job, &file.display().to_string(), job.window.1, &r)?;
        }
        Command::Circle { module, underived, job } => {
            let x = job.algebra()?;
            let p = job.params();
            let doc = algebra_to_string(&x);
            if underived {
                let through = p.dtot() - 1;
                let what = format!("circle-underived|{module:?}");
                let r = cached(&job, key(&job, &what, &doc), through, || {
                    Ok(homology(&relative_circle(module, &x, p.dtot())?))
                })?;
                homology_out(&job, &format!("{} ∘_O {}", module_name(module), x.name), through, &r)?;
            } else {
                let through = p.soundness();
                let r = cached(&job, key(&job, &format!("circle|{module:?}"), &doc), through, || {
                    Ok(homology(&derived_circle(module, &x, p)?.complex))
                })?;
                homology_out(&job, &format!("{} ∘^h_O {}", module_name(module), x.name), through, &r)?;
            }
        }
        Command::Tq { job } => {
            let x = job.algebra()?;
            let p = job.params();
            let doc = algebra_to_string(&x);
            let r = cached(&job, key(&job, "tq", &doc), p.soundness(), || Ok(homology(&tq(&x, p)?.complex)))?;
            homology_out(&job, &format!("Q({})", x.name), p.soundness(), &r)?;
        }
        Command::BarDump { degenerate, job } => {
            let x = job.algebra()?;
            let p = job.params();
            let x = prepare(&x, p.dtot())?;
            let bar = Bar::new(&x, BarOptions::new(p.levels, p.dtot()).uniform())?;
            let summary = bar.summary();
            let mut parts = Vec::new();
            for n in 1..=degenerate.min(p.levels) {
                let d = bar.degenerate_subobject(n).map_err(anyhow::Error::msg)?;
                parts.push((n, d));
            }
            if job.json {
                #[derive(Serialize)]
                struct Dump<'a> {
                    algebra: &'a str,
                    levels: usize,
                    dtot: i32,
                    summary: &'a [hocomp_core::bar::LevelSummary],
                    degenerate: &'a [(usize, Vec<hocomp_core::bar::DegeneratePart>)],
                }
                emit(&job, &json(&Dump { algebra: &x.name, levels: p.levels, dtot: p.dtot(), summary: &summary, degenerate: &parts }))?;
            } else {
                let mut s = format!("# Bar(O, O, {}) through total degree {}\nlevel  dim  nondeg  face ranks\n", x.name, p.dtot());
                for l in &summary {
                    let f: Vec<String> = l.face_ranks.iter().map(|r| r.to_string()).collect();
                    let _ = writeln!(s, "{:>5}  {:>3}  {:>6}  {}", l.level, l.dim, l.nondegenerate, f.join(","));
                }
                s.push_str("level  degree  degenerate\n");
                for (n, d) in &parts {
                    for part in d {
                        let _ = writeln!(s, "{:>5}  {:>6}  {}", n, part.degree, part.dim);
                    }
                }
                emit(&job, &s)?;
            }
        }
        Command::Tower { job } => {
            let x = job.algebra()?;
            let t = CompletionTower::build(&x, job.kmax(), job.params())?;
            let r = t.completion()?;
            if job.json {
                emit(&job, &json(&r))?;
            } else {
                emit(&job, &format!("# completion tower of {}, {} stages, exact through degree {}\n{}", x.name, r.kmax, r.soundness, r.table()))?;
            }
        }
        Command::Ss { format, job } => {
            let x = job.algebra()?;
            let t = CompletionTower::build(&x, job.kmax(), job.params())?;
            let ss = t.spectral_sequence(job.kmax())?;
            match (format, job.json) {
                (_, true) => emit(&job, &json(&ss))?,
                (SsFormat::Csv, false) => emit(&job, &ss.to_csv())?,
                (SsFormat::Report, false) => emit(&job, &ss.report())?,
            }
            return Ok(ss.certificate.holds);
        }
        Command::Pushout { file, dtot, job } => {
            let f: PushoutFile = serde_json::from_str(&read(&file)?).with_context(|| format!("in {}", file.display()))?;
            let d = dtot.unwrap_or(job.window.1);
            let data = f.build(job.cutoff, Some(d))?;
            let p = pushout(&data, d)?;
            if job.json {
                #[derive(Serialize)]
                struct Out<'a> {
                    dtot: i32,
                    direct: std::collections::BTreeMap<i32, usize>,
                    filtered: &'a hocomp_core::pushout::Filtered,
                }
                emit(&job, &json(&Out { dtot: d, direct: p.dims(), filtered: &p.filtered }))?;
            } else {
                let mut s = format!("# pushout through degree {d}: direct and filtered agree\ndegree  dim");
                for t in 0..p.filtered.stages.len() {
                    let _ = write!(s, "  A_{t}");
                }
                s.push('\n');
                let dims = p.dims();
                for n in job.window.0.max(0)..=d {
                    let _ = write!(s, "{:>6}  {:>3}", n, dims.get(&n).copied().unwrap_or(0));
                    for st in &p.filtered.stages {
                        let _ = write!(s, "  {:>3}", st.get(&n).copied().unwrap_or(0));
                    }
                    s.push('\n');
                }
                emit(&job, &s)?;
            }
        }
        Command::Verify { statement, map, job } => {
            let p = job.params();
            let v = match statement {
                Statement::Axioms => verify::axioms(&job.operad()?),
                Statement::Hurewicz => verify::hurewicz(&job.algebra()?, p)?,
                Statement::Finiteness => verify::finiteness(&job.algebra()?, p)?,
                Statement::Convergence => verify::convergence(&job.algebra()?, job.kmax(), p)?,
                Statement::RelHurewicz => verify::relative_hurewicz(&job.map(map.as_deref())?, job.kmax(), p)?,
                Statement::Whitehead => verify::whitehead(&job.map(map.as_deref())?, p)?,
            };
            return verdict(&job, v);
        }
    }
    Ok(true)
}
