use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use num_complex::Complex64;
use serde::Serialize;
use valence_forge::becker::becker_suite;
use valence_forge::construction::dense::{assemble_dense, van_der_corput_anchors, DenseConfig};
use valence_forge::construction::{build_construction, ConstructionParams, ConstructionState, StateJson};
use valence_forge::dimension::construction_dimension;
use valence_forge::gmap::{check_bilipschitz, valence_demo};
use valence_forge::report::VerificationReport;
use valence_forge::seed::{builtin_exp_seed, estimate_constants, seed_checks, user_seed, SeedConstants, SeedFunction, UserSeedFile};
use valence_forge::svg::{loglog_svg, loop_svg};
use valence_forge::verify::{check_construction_bounds, check_density_window, maximal_density_set};

use crate::config::{Command, RunConfig, SeedName};

const ORIGIN: Complex64 = Complex64::new(0.0, 0.0);
const SEED_SAMPLES: usize = 5000;

/// Executes the configured command, returning every report it produced.
pub fn run(cfg: &RunConfig) -> Result<Vec<VerificationReport>> {
    fs::create_dir_all(&cfg.out_dir).with_context(|| format!("creating {}", cfg.out_dir.display()))?;
    write_json(&cfg.out_dir.join("config.json"), cfg)?;
    let mut ctx = Ctx { cfg, seed: None, state: None };
    let mut out = Vec::new();
    let stages: &[Command] = match cfg.command {
        Command::All => &[Command::Seed, Command::Construct, Command::Verify, Command::Gmap, Command::Valence, Command::Dimension],
        ref c => std::slice::from_ref(c),
    };
    for stage in stages {
        let reports = match stage {
            Command::Seed => ctx.seed_stage()?,
            Command::Construct => ctx.construct_stage()?,
            Command::Verify => ctx.verify_stage()?,
            Command::Gmap => ctx.gmap_stage()?,
            Command::Valence => ctx.valence_stage()?,
            Command::Dimension => ctx.dimension_stage()?,
            Command::Becker => ctx.becker_stage()?,
            Command::Dense => ctx.dense_stage()?,
            Command::All => unreachable!("expanded above"),
        };
        for r in &reports {
            println!("{}", r.summary_line());
        }
        out.extend(reports);
    }
    Ok(out)
}

struct Ctx<'a> {
    cfg: &'a RunConfig,
    seed: Option<(SeedFunction, SeedConstants)>,
    state: Option<ConstructionState>,
}

impl Ctx<'_> {
    fn path(&self, name: &str) -> PathBuf {
        self.cfg.out_dir.join(name)
    }

    fn seed(&mut self) -> Result<&(SeedFunction, SeedConstants)> {
        if self.seed.is_none() {
            let g = match &self.cfg.seed {
                SeedName::Exp => builtin_exp_seed()?,
                SeedName::User(p) => {
                    let text = fs::read_to_string(p).with_context(|| format!("reading seed {}", p.display()))?;
                    let file: UserSeedFile = serde_json::from_str(&text).with_context(|| format!("parsing seed {}", p.display()))?;
                    user_seed(&file)?
                }
            };
            let c = estimate_constants(&g)?;
            self.seed = Some((g, c));
        }
        Ok(self.seed.as_ref().expect("just set"))
    }

    fn params(&self) -> Result<ConstructionParams> {
        let c = self.cfg;
        Ok(ConstructionParams::derive(c.n, c.eps, c.beta1, c.gamma1)?)
    }

    fn state(&mut self) -> Result<&ConstructionState> {
        if self.state.is_none() {
            let st = match &self.cfg.state {
                Some(p) => load_state(p)?,
                None => build_construction(self.params()?, self.cfg.depth, self.cfg.tol)?,
            };
            self.state = Some(st);
        }
        Ok(self.state.as_ref().expect("just set"))
    }

    fn seed_stage(&mut self) -> Result<Vec<VerificationReport>> {
        let cfg = self.cfg;
        let (g, c) = self.seed()?;
        let reports = seed_checks(g, c, SEED_SAMPLES, cfg.rng_seed)?;
        write_json(&cfg.out_dir.join("seed.json"), g)?;
        write_json(&cfg.out_dir.join("constants.json"), c)?;
        write_jsonl(&cfg.out_dir.join("seed_checks.jsonl"), &reports)?;
        Ok(reports)
    }

    fn construct_stage(&mut self) -> Result<Vec<VerificationReport>> {
        let st = build_construction(self.params()?, self.cfg.depth, self.cfg.tol)?;
        let path = self.path("state.json");
        write_json(&path, &st.to_json()?)?;
        // later stages read the state back from the file just written
        let st = load_state(&path)?;
        let bound = st.centering_bound(1, 7.0) / st.params.scale(1);
        let mut reports = vec![VerificationReport::new("root_residual", None, self.cfg.tol, st.max_residual(), st.records().len(), ORIGIN)];
        reports[0].note = Some(format!("{} node records, level counts {:?}, 7eps relative bound {bound:.3e}", st.records().len(), st.level_counts()));
        self.state = Some(st);
        Ok(reports)
    }

    fn verify_stage(&mut self) -> Result<Vec<VerificationReport>> {
        let (samples, rng) = (self.cfg.samples, self.cfg.rng_seed);
        let st = self.state()?;
        let mut reports = check_construction_bounds(st, samples, rng)?;
        let x = maximal_density_set(1.0, 10, 0.1)?;
        reports.push(check_density_window(&x, 1.0, 10, 0.1, 10.0, 10_000)?);
        write_jsonl(&self.path("reports.jsonl"), &reports)?;
        write_csv(&self.path("reports.csv"), &reports)?;
        Ok(reports)
    }

    fn gmap_stage(&mut self) -> Result<Vec<VerificationReport>> {
        let (pairs, tol, rng, depth) = (self.cfg.pairs, self.cfg.tol, self.cfg.rng_seed, self.cfg.depth);
        self.seed()?;
        self.state()?;
        let (g, c) = self.seed.as_ref().expect("loaded");
        let st = self.state.as_ref().expect("loaded");
        let level = depth.min(st.depth);
        let available = st.level_counts()[level - 1];
        let pairs = pairs.min(available * (available - 1) / 2);
        let r = check_bilipschitz(g, st, level, c, pairs, tol, rng)?;
        write_json(&self.path("bilipschitz.json"), &r)?;
        Ok(r.reports().into_iter().cloned().collect())
    }

    fn valence_stage(&mut self) -> Result<Vec<VerificationReport>> {
        let (tol, points, depth, svg) = (self.cfg.tol, self.cfg.boundary_points, self.cfg.depth, self.cfg.svg);
        self.seed()?;
        self.state()?;
        let (g, c) = self.seed.as_ref().expect("loaded");
        let st = self.state.as_ref().expect("loaded");
        let r = valence_demo(g, st, c, depth.min(st.depth), tol, points)?;
        write_json(&self.path("valence.json"), &r)?;
        if svg {
            for (d, lp) in r.disks.iter().zip(&r.loops) {
                let title = format!("G(boundary) - w, disk {} (level {}), winding {}", d.anchor, d.level, d.winding);
                write_text(&self.path(&format!("valence_disk{}.svg", d.level)), &loop_svg(lp, ORIGIN, &title))?;
            }
        }
        let mut reports = Vec::new();
        for d in &r.disks {
            let node = Some(d.anchor.to_string());
            let w = d.winding as f64;
            reports.push(VerificationReport::lower("valence_winding", node.clone(), 1.0, w, w, d.boundary_points, d.local_center));
            reports.push(VerificationReport::new("winding_integrality", node.clone(), 1e-3 / (2.0 * std::f64::consts::PI), (d.raw_winding - w).abs(), d.boundary_points, d.local_center));
            let spot_dev = d.spot_windings.iter().map(|&s| (s - 1).abs()).max().unwrap_or(1) as f64;
            reports.push(VerificationReport::new("valence_spot_windings", node, 0.5, spot_dev, d.spot_windings.len(), d.local_center));
        }
        let total = r.total_preimages as f64;
        reports.push(VerificationReport::lower("valence_total", None, r.depth as f64, total, total, r.disks.len(), r.target_w));
        reports.push(VerificationReport::lower("valence_disjoint", None, f64::MIN_POSITIVE, r.min_separation, r.min_separation, r.disks.len(), r.z_beta).with_note("gap between disks in units of rho"));
        Ok(reports)
    }

    fn dimension_stage(&mut self) -> Result<Vec<VerificationReport>> {
        let svg = self.cfg.svg;
        let st = self.state()?;
        let r = construction_dimension(st)?;
        write_json(&self.path("dimension.json"), &r)?;
        if svg {
            let data: Vec<(f64, f64)> = r.scales.iter().zip(&r.counts).map(|(&s, &n)| (s, n)).collect();
            write_text(&self.path("dimension.svg"), &loglog_svg(&data, "box counts against scale"))?;
        }
        let s = r.formula_s.unwrap_or(f64::NAN);
        let dn = r.formula_dn.unwrap_or(f64::NAN);
        let cantor = r.cantor_reference.unwrap_or(f64::NAN);
        println!("d(N) = {dn:.12}  s = {s:.12}  box slope = {:.12}", r.two_scale_slope);
        let samples = r.counts.len();
        Ok(vec![
            VerificationReport::new("dimension_slope", None, 1e-6, (r.two_scale_slope - s).abs(), samples, ORIGIN),
            VerificationReport::new("dimension_formula", None, 1e-12, (dn - s).abs(), 1, ORIGIN),
            VerificationReport::new("cantor_reference", None, 1e-6, (cantor - 2f64.ln() / 3f64.ln()).abs(), 1, ORIGIN),
        ])
    }

    fn becker_stage(&mut self) -> Result<Vec<VerificationReport>> {
        let results = becker_suite(self.cfg.tau, self.cfg.becker_samples, self.cfg.rng_seed)?;
        write_jsonl(&self.path("becker.jsonl"), &results)?;
        let mut reports = Vec::new();
        for b in &results {
            reports.push(b.schwarz_pick.clone());
            reports.push(b.composed.clone());
            if b.map.is_isometry() {
                let dev = (b.sp_max_ratio - 1.0).abs().max((b.sp_min_ratio - 1.0).abs());
                reports.push(VerificationReport::new("schwarz_pick_equality", Some(b.name.clone()), 1e-12, dev, self.cfg.becker_samples, ORIGIN));
            }
        }
        Ok(reports)
    }

    fn dense_stage(&mut self) -> Result<Vec<VerificationReport>> {
        let c = self.cfg;
        let dc = DenseConfig {
            eps: c.eps,
            beta1: c.beta1,
            gamma1_factor: c.gamma1 / (c.eps * c.beta1),
            max_stage: c.max_stage,
            anchors: van_der_corput_anchors(c.max_stage),
            tol: c.tol,
            rng_seed: c.rng_seed,
            ..DenseConfig::default()
        };
        let d = assemble_dense(&dc)?;
        write_json(&self.path("dense.json"), &d)?;
        let mut reports = Vec::new();
        for cert in &d.certificates {
            let node = Some(format!("stage{}", cert.stage));
            let pt = Complex64::new(cert.center, 0.0);
            reports.push(VerificationReport::lower("dense_margin", node.clone(), 0.0, cert.current_margin, cert.current_margin, dc.cert_samples, pt));
            let ratio = cert.original_margin / cert.current_margin;
            reports.push(VerificationReport::new("dense_degradation", node, dc.degradation, ratio, dc.cert_samples, pt));
        }
        Ok(reports)
    }
}

fn load_state(path: &Path) -> Result<ConstructionState> {
    let text = fs::read_to_string(path).with_context(|| format!("reading state {}", path.display()))?;
    let js: StateJson = serde_json::from_str(&text).with_context(|| format!("parsing state {}", path.display()))?;
    Ok(ConstructionState::from_json(&js)?)
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<()> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    write_text(path, &s)
}

fn write_jsonl<T: Serialize>(path: &Path, values: &[T]) -> Result<()> {
    let mut s = String::new();
    for v in values {
        s.push_str(&serde_json::to_string(v)?);
        s.push('\n');
    }
    write_text(path, &s)
}

fn write_csv(path: &Path, reports: &[VerificationReport]) -> Result<()> {
    let file = fs::File::create(path).with_context(|| format!("writing {}", path.display()))?;
    let mut w = csv::Writer::from_writer(file);
    w.write_record(["check_id", "node", "bound", "observed_min", "observed_max", "margin", "samples", "skipped", "pass", "informational", "worst_re", "worst_im"])?;
    for r in reports {
        w.write_record([
            r.check_id.clone(),
            r.node.clone().unwrap_or_default(),
            r.bound.to_string(),
            r.observed_min.map(|v| v.to_string()).unwrap_or_default(),
            r.observed_max.to_string(),
            r.margin.to_string(),
            r.samples.to_string(),
            r.skipped.to_string(),
            r.pass.to_string(),
            r.informational.to_string(),
            r.worst_point.re.to_string(),
            r.worst_point.im.to_string(),
        ])?;
    }
    w.flush()?;
    w.into_inner().map_err(|e| anyhow::anyhow!("{e}"))?.flush()?;
    Ok(())
}
