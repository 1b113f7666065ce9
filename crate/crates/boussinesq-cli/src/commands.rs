//! The seven experiment commands, all thin wrappers over the library with
//! deterministic file formats and self-describing reports.

use crate::cfg::{derived, parse_f64_list, Overlay};
use boussinesq_ist::asymptotics::{
    u_asymptotic, write_profile_csv, AsymptoticConfig, AsymptoticTerm, CircleInterp,
};
use boussinesq_ist::io::{self, fmt_float, fnv64_file};
use boussinesq_ist::painleve::{solve_hastings_mcleod, HastingsMcLeod};
use boussinesq_ist::scattering::{
    estimate_blowup_t, reflection_coefficients, verify_identities, InitialData, RaySample,
    ReflectionTable, SamplingPlan, VolterraConfig, DEFAULT_BLOWUP_WINDOW, DEFAULT_DECAY_TAIL,
};
use boussinesq_ist::sim::{init_simulation, sim_grid, SimConfig};
use boussinesq_ist::{Error, Result};
use num_complex::Complex64;
use serde_json::json;
use std::path::{Path, PathBuf};

fn input_err(path: &Path, msg: impl Into<String>) -> Error {
    Error::Input { path: path.display().to_string(), msg: msg.into() }
}

fn check_exists(path: &Path) -> Result<()> {
    if path.is_file() {
        Ok(())
    } else {
        Err(input_err(path, "no such file"))
    }
}

fn write_json(path: &Path, value: &serde_json::Value) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| Error::Inconsistent(format!("report serialization: {e}")))?;
    text.push('\n');
    Ok(std::fs::write(path, text)?)
}

/// Finite floats as numbers, inf/nan as strings (JSON has no encoding for
/// them and the reports must stay machine-readable).
fn jnum(v: f64) -> serde_json::Value {
    if v.is_finite() {
        json!(v)
    } else {
        json!(v.to_string())
    }
}

fn hash_hex(h: u64) -> String {
    format!("{h:016x}")
}

fn find_hash_comment(comments: &[String]) -> Option<String> {
    comments
        .iter()
        .find_map(|c| c.strip_prefix("data_hash =").map(|s| s.trim().to_string()))
}

// ---------------------------------------------------------------------------
// Interpolation helpers
// ---------------------------------------------------------------------------

/// Cubic Lagrange interpolation on a uniform ascending grid; zero outside
/// the grid (consistent with decaying data).
fn interp_uniform(x0: f64, h: f64, ys: &[f64], x: f64) -> f64 {
    let n = ys.len();
    let pos = (x - x0) / h;
    if pos < 0.0 || pos > (n - 1) as f64 {
        return 0.0;
    }
    let mut i0 = pos.floor() as usize;
    i0 = i0.saturating_sub(1).min(n - 4);
    let t = pos - i0 as f64;
    let mut acc = 0.0;
    for (p, &y) in ys[i0..i0 + 4].iter().enumerate() {
        let mut w = 1.0;
        for q in 0..4 {
            if q != p {
                w *= (t - q as f64) / (p as f64 - q as f64);
            }
        }
        acc += w * y;
    }
    acc
}

/// Sixth-order centered derivative with zero padding beyond the grid.
fn fd6_derivative(ys: &[f64], h: f64) -> Vec<f64> {
    let n = ys.len() as isize;
    let get = |i: isize| if i < 0 || i >= n { 0.0 } else { ys[i as usize] };
    (0..n)
        .map(|m| {
            (-get(m - 3) + 9.0 * get(m - 2) - 45.0 * get(m - 1) + 45.0 * get(m + 1)
                - 9.0 * get(m + 2)
                + get(m + 3))
                / (60.0 * h)
        })
        .collect()
}

/// Read `x,u0,v0` initial data, optionally resampled to 2n+1-style uniform
/// points on [-xmax, xmax].
fn load_initial_data(path: &Path, xmax: Option<f64>, ngrid: Option<usize>) -> Result<InitialData> {
    check_exists(path)?;
    match (xmax, ngrid) {
        (None, None) => InitialData::from_csv(path),
        _ => {
            let raw = io::read_csv(path, &["x", "u0", "v0"])?;
            let xs = &raw.columns[0];
            if xs.len() < 4 {
                return Err(input_err(path, "need at least 4 samples to resample"));
            }
            let h_src = xs[1] - xs[0];
            let xm = xmax.unwrap_or_else(|| xs.last().unwrap().abs().max(xs[0].abs()));
            let n = ngrid.unwrap_or(4096);
            let grid: Vec<f64> = (0..n).map(|j| -xm + 2.0 * xm * j as f64 / (n - 1) as f64).collect();
            let u0 = grid
                .iter()
                .map(|&x| interp_uniform(xs[0], h_src, &raw.columns[1], x))
                .collect();
            let v0 = grid
                .iter()
                .map(|&x| interp_uniform(xs[0], h_src, &raw.columns[2], x))
                .collect();
            InitialData::new(grid, u0, v0, DEFAULT_DECAY_TAIL)
        }
    }
}

// ---------------------------------------------------------------------------
// scatter
// ---------------------------------------------------------------------------

pub fn cmd_scatter(
    ov: &Overlay,
    input: Option<PathBuf>,
    out: Option<PathBuf>,
    xmax: Option<f64>,
    ngrid: Option<usize>,
    tol: Option<f64>,
) -> Result<()> {
    let input = ov.path_req(input, "input")?;
    let out = ov.path_req(out, "out")?;
    let xmax = ov.f64_opt(xmax, "xmax")?;
    let ngrid = ov.usize_opt(ngrid, "ngrid")?;
    let data = load_initial_data(&input, xmax, ngrid)?;
    let hash = hash_hex(fnv64_file(&input)?);

    let mut plan = SamplingPlan::default();
    plan.n_theta = ov.usize(None, "n_theta", plan.n_theta)?;
    plan.exclusion = ov.f64(None, "exclusion", plan.exclusion)?;
    let mut vcfg = VolterraConfig::default();
    vcfg.tol = ov.f64(tol, "tol", vcfg.tol)?;
    vcfg.tol_zero = ov.f64(None, "tol_zero", vcfg.tol_zero)?;

    let table = reflection_coefficients(&data, &plan, &vcfg)?;
    let comments = vec![
        format!("data_hash = {hash}"),
        format!("exclusion = {}", fmt_float(plan.exclusion)),
        format!("tol = {}", fmt_float(vcfg.tol)),
    ];
    table.write_circle_csv(&out, &comments)?;
    table.write_ray_csv(&derived(&out, "_ray.csv"), &[format!("data_hash = {hash}")])?;

    let conv_circle = table.circle.iter().filter(|s| s.converged).count();
    let excluded = table.circle.iter().filter(|s| s.excluded).count();
    let conv_ray = table.ray.iter().filter(|s| s.converged).count();
    write_json(
        &derived(&out, "_report.json"),
        &json!({
            "command": "scatter",
            "input": input.display().to_string(),
            "data_hash": hash,
            "sampling": {
                "n_theta": plan.n_theta,
                "exclusion": plan.exclusion,
                "n_ray": plan.taus.len(),
                "n_x": data.x.len(),
            },
            "tolerances": { "tol": vcfg.tol, "tol_zero": vcfg.tol_zero },
            "circle_converged": conv_circle,
            "circle_excluded": excluded,
            "ray_converged": conv_ray,
        }),
    )
}

// ---------------------------------------------------------------------------
// verify
// ---------------------------------------------------------------------------

pub fn cmd_verify(ov: &Overlay, r: Option<PathBuf>, report: Option<PathBuf>) -> Result<()> {
    let r = ov.path_req(r, "r")?;
    let report = ov.path_req(report, "report")?;
    check_exists(&r)?;
    let ray_path = derived(&r, "_ray.csv");
    let ray = if ray_path.is_file() { Some(ray_path.as_path()) } else { None };
    let table = ReflectionTable::read_csv(&r, ray)?;
    let hash = find_hash_comment(&io::read_csv(&r, &[])?.comments);

    let tol_identity = ov.f64(None, "tol_identity", 1e-6)?;
    let tol_inequality = ov.f64(None, "tol_inequality", 1e-8)?;
    let checks = verify_identities(&table, tol_identity, tol_inequality);
    let usable = table.circle.iter().filter(|s| s.converged && !s.excluded).count();
    let all_pass = checks.iter().all(|c| c.pass);
    write_json(
        &report,
        &json!({
            "command": "verify",
            "r": r.display().to_string(),
            "data_hash": hash,
            "tolerances": { "identity": tol_identity, "inequality": tol_inequality },
            "sampling": { "circle_samples": usable, "ray_samples": table.ray.len() },
            "checks": checks.iter().map(|c| json!({
                "name": c.name,
                "max_residual": jnum(c.max_residual),
                "tolerance": c.tolerance,
                "pass": c.pass,
            })).collect::<Vec<_>>(),
            "all_pass": all_pass,
        }),
    )
}

// ---------------------------------------------------------------------------
// asymptote
// ---------------------------------------------------------------------------

fn load_hm(path: &Path) -> Result<HastingsMcLeod> {
    check_exists(path)?;
    let data = io::read_csv(path, &["y", "u", "u_prime", "u_P"])?;
    let mut cols = data.columns.into_iter();
    Ok(HastingsMcLeod {
        y_grid: cols.next().unwrap(),
        u: cols.next().unwrap(),
        u_prime: cols.next().unwrap(),
        converged: true,
    })
}

pub fn cmd_asymptote(
    ov: &Overlay,
    r: Option<PathBuf>,
    hm: Option<PathBuf>,
    t: Option<String>,
    xmin: Option<f64>,
    xmax: Option<f64>,
    dx: Option<f64>,
    out: Option<PathBuf>,
) -> Result<()> {
    let r = ov.path_req(r, "r")?;
    let hm_path = ov.path_req(hm, "hm")?;
    let ts = parse_f64_list(&ov.str_req(t, "t")?)?;
    let xmin = ov.f64_req(xmin, "xmin")?;
    let xmax = ov.f64_req(xmax, "xmax")?;
    let dx = ov.f64_req(dx, "dx")?;
    let out = ov.path_req(out, "out")?;
    if dx <= 0.0 || xmax < xmin {
        return Err(Error::Inconsistent(format!(
            "need dx > 0 and xmax >= xmin, got dx = {dx}, [{xmin}, {xmax}]"
        )));
    }
    check_exists(&r)?;
    let table = ReflectionTable::read_csv(&r, None)?;
    let hash = find_hash_comment(&io::read_csv(&r, &[])?.comments);
    let it = CircleInterp::new(&table)?;
    let hm = load_hm(&hm_path)?;
    let cfg = AsymptoticConfig {
        t_min: ov.f64(None, "t_min", AsymptoticConfig::default().t_min)?,
        shock_halfwidth: ov.f64(
            None,
            "shock_halfwidth",
            AsymptoticConfig::default().shock_halfwidth,
        )?,
    };

    let mut rows: Vec<(f64, f64, AsymptoticTerm)> = Vec::new();
    let mut skipped = 0usize;
    for &t in &ts {
        let n = ((xmax - xmin) / dx).round() as usize;
        for j in 0..=n {
            let x = xmin + dx * j as f64;
            match u_asymptotic(&it, &hm, x, t, &cfg) {
                Ok(term) => rows.push((x, t, term)),
                Err(_) => skipped += 1,
            }
        }
    }
    let mut comments = Vec::new();
    if let Some(h) = &hash {
        comments.push(format!("data_hash = {h}"));
    }
    comments.push(format!("t = {}", ts.iter().map(|v| fmt_float(*v)).collect::<Vec<_>>().join(" ")));
    comments.push(format!(
        "xmin = {} xmax = {} dx = {}",
        fmt_float(xmin),
        fmt_float(xmax),
        fmt_float(dx)
    ));
    comments.push(format!(
        "t_min = {} shock_halfwidth = {}",
        fmt_float(cfg.t_min),
        fmt_float(cfg.shock_halfwidth)
    ));
    comments.push(format!("skipped = {skipped}"));
    write_profile_csv(&out, &comments, &rows)
}

// ---------------------------------------------------------------------------
// simulate
// ---------------------------------------------------------------------------

pub fn cmd_simulate(ov: &Overlay, config: Option<PathBuf>, out: Option<PathBuf>) -> Result<()> {
    let cfg_path = ov.path_req(config, "config")?;
    let out_dir = ov.path_req(out, "out")?;
    check_exists(&cfg_path)?;
    let kv = io::read_key_value(&cfg_path)?;
    let mut sc = SimConfig::default();
    sc.apply_key_values(&kv)?;
    sc.validate()?;
    std::fs::create_dir_all(&out_dir)?;

    let grid = sim_grid(sc.l, sc.n);
    let h = grid[1] - grid[0];
    let get = |key: &str| kv.iter().rev().find(|(k, _)| k == key).map(|(_, v)| v.as_str());
    let (u0, u1, hash): (Vec<f64>, Vec<f64>, String) = if let Some(p) = get("data_csv") {
        let p = PathBuf::from(p);
        check_exists(&p)?;
        let raw = io::read_csv(&p, &["x", "u0", "v0"])?;
        let h_src = raw.columns[0][1] - raw.columns[0][0];
        let x0 = raw.columns[0][0];
        let u0: Vec<f64> = grid.iter().map(|&x| interp_uniform(x0, h_src, &raw.columns[1], x)).collect();
        let v0: Vec<f64> = grid.iter().map(|&x| interp_uniform(x0, h_src, &raw.columns[2], x)).collect();
        // v0' = u1 exactly, by the definition of v.
        (u0, fd6_derivative(&v0, h), hash_hex(fnv64_file(&p)?))
    } else {
        let amp: f64 = get("u0_amp")
            .ok_or_else(|| Error::Inconsistent("config needs data_csv or u0_amp/u0_alpha".into()))?
            .parse()
            .map_err(|_| Error::Inconsistent("bad float for u0_amp".into()))?;
        let alpha: f64 = get("u0_alpha")
            .unwrap_or("0.02")
            .parse()
            .map_err(|_| Error::Inconsistent("bad float for u0_alpha".into()))?;
        let u0: Vec<f64> = grid.iter().map(|&x| amp * (-alpha * x * x).exp()).collect();
        // Canonical initial-data artifact: scatter hashes the same file, so
        // derived outputs can be cross-checked.
        let init_path = out_dir.join("initial.csv");
        let rows = (0..grid.len()).map(|i| vec![grid[i], u0[i], 0.0]);
        io::write_csv(&init_path, &[], "x,u0,v0", rows)?;
        (u0, vec![0.0; grid.len()], hash_hex(fnv64_file(&init_path)?))
    };

    let mut comments = sc.to_comments();
    comments.push(format!("data_hash = {hash}"));
    let mut sim = init_simulation(&u0, &u1, sc.clone())?;
    let snaps = sim.run()?;
    let mut times = Vec::new();
    for (i, snap) in snaps.iter().enumerate() {
        snap.to_csv(&out_dir.join(format!("snapshot_{i:04}.csv")), &comments)?;
        times.push(snap.t);
    }
    write_json(
        &out_dir.join("report.json"),
        &json!({
            "command": "simulate",
            "config": cfg_path.display().to_string(),
            "data_hash": hash,
            "snapshots": times,
            "t_end": sc.t_end,
            "max_imag": jnum(sim.max_imag()),
        }),
    )
}

// ---------------------------------------------------------------------------
// compare
// ---------------------------------------------------------------------------

struct ProfileRow {
    x: f64,
    t: f64,
    u: f64,
    sector: String,
    extrapolated: bool,
}

fn read_profile(path: &Path) -> Result<(Vec<String>, Vec<ProfileRow>)> {
    check_exists(path)?;
    let text = std::fs::read_to_string(path)?;
    let mut comments = Vec::new();
    let mut rows = Vec::new();
    let mut saw_header = false;
    for (idx, line) in text.lines().enumerate() {
        let t = line.trim();
        if t.is_empty() {
            continue;
        }
        if let Some(rest) = t.strip_prefix('#') {
            comments.push(rest.trim().to_string());
            continue;
        }
        if !saw_header {
            if t != "x,t,u_asym,sector,extrapolated" {
                return Err(input_err(path, format!("unexpected header {t:?}")));
            }
            saw_header = true;
            continue;
        }
        let f: Vec<&str> = t.split(',').collect();
        if f.len() != 5 {
            return Err(input_err(path, format!("line {}: expected 5 fields", idx + 1)));
        }
        let num = |s: &str| {
            s.parse::<f64>()
                .map_err(|_| input_err(path, format!("line {}: bad float {s:?}", idx + 1)))
        };
        rows.push(ProfileRow {
            x: num(f[0])?,
            t: num(f[1])?,
            u: num(f[2])?,
            sector: f[3].to_string(),
            extrapolated: f[4] == "1",
        });
    }
    if !saw_header {
        return Err(input_err(path, "no header line found"));
    }
    Ok((comments, rows))
}

struct Windows {
    i_lo: f64,
    i_hi: f64,
    iii_halfwidth: f64,
    iv_lo: f64,
    iv_hi: f64,
    v_lo: f64,
    v_hi: f64,
}

impl Windows {
    fn contains(&self, sector: &str, x: f64, t: f64) -> bool {
        let zeta = x.abs() / t;
        match sector {
            "I" | "II" => (self.i_lo..=self.i_hi).contains(&zeta),
            "III" => (x - t).abs() <= self.iii_halfwidth * t.powf(1.0 / 3.0),
            "IV" => (self.iv_lo..=self.iv_hi).contains(&zeta),
            "V" => (self.v_lo..=self.v_hi).contains(&zeta),
            _ => false,
        }
    }
}

struct Accum {
    n: usize,
    sum_gap2: f64,
    max_gap: f64,
    sum_ref2: f64,
    max_ref: f64,
}

impl Accum {
    fn new() -> Self {
        Self { n: 0, sum_gap2: 0.0, max_gap: 0.0, sum_ref2: 0.0, max_ref: 0.0 }
    }
    fn push(&mut self, gap: f64, reference: f64) {
        self.n += 1;
        self.sum_gap2 += gap * gap;
        self.max_gap = self.max_gap.max(gap.abs());
        self.sum_ref2 += reference * reference;
        self.max_ref = self.max_ref.max(reference.abs());
    }
    fn l2_abs(&self) -> f64 {
        (self.sum_gap2 / self.n.max(1) as f64).sqrt()
    }
    fn rel(num: f64, den: f64) -> f64 {
        if den > 0.0 {
            num / den
        } else if num == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    }
}

const SECTOR_ORDER: [&str; 5] = ["I", "II", "III", "IV", "V"];

pub fn cmd_compare(
    ov: &Overlay,
    sim: Option<PathBuf>,
    asym: Option<PathBuf>,
    report: Option<PathBuf>,
) -> Result<()> {
    let sim_dir = ov.path_req(sim, "sim")?;
    let asym_path = ov.path_req(asym, "asym")?;
    let report_path = ov.path_req(report, "report")?;
    if !sim_dir.is_dir() {
        return Err(input_err(&sim_dir, "no such directory"));
    }
    let win = Windows {
        i_lo: ov.f64(None, "window_i_lo", 1.2)?,
        i_hi: ov.f64(None, "window_i_hi", 3.0)?,
        iii_halfwidth: ov.f64(None, "window_iii_halfwidth", 2.0)?,
        iv_lo: ov.f64(None, "window_iv_lo", 0.65)?,
        iv_hi: ov.f64(None, "window_iv_hi", 0.95)?,
        v_lo: ov.f64(None, "window_v_lo", 0.1)?,
        v_hi: ov.f64(None, "window_v_hi", 0.5)?,
    };

    let mut snap_files: Vec<PathBuf> = std::fs::read_dir(&sim_dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| {
            p.file_name()
                .and_then(|n| n.to_str())
                .is_some_and(|n| n.starts_with("snapshot_") && n.ends_with(".csv"))
        })
        .collect();
    snap_files.sort();
    if snap_files.is_empty() {
        return Err(input_err(&sim_dir, "no snapshot_*.csv files"));
    }

    let (asym_comments, profile) = read_profile(&asym_path)?;
    let asym_hash = find_hash_comment(&asym_comments)
        .ok_or_else(|| input_err(&asym_path, "missing data_hash comment"))?;

    // One metrics row per (snapshot time, sector).
    let mut metrics = Vec::new();
    let mut per_sector: std::collections::BTreeMap<String, Vec<(f64, f64)>> = Default::default();
    let mut times = Vec::new();
    let mut iii_left_worse = false;
    for file in &snap_files {
        let data = io::read_csv(file, &["x", "u", "v"])?;
        let sim_hash = find_hash_comment(&data.comments)
            .ok_or_else(|| input_err(file, "missing data_hash comment"))?;
        if sim_hash != asym_hash {
            return Err(Error::Inconsistent(format!(
                "initial-data hash mismatch: simulation {sim_hash} vs asymptotics {asym_hash}"
            )));
        }
        let t: f64 = data
            .comments
            .iter()
            .find_map(|c| c.strip_prefix("t=").and_then(|s| s.trim().parse().ok()))
            .ok_or_else(|| input_err(file, "missing `# t=<value>` comment"))?;
        times.push(t);
        let xs = &data.columns[0];
        let us = &data.columns[1];
        let h = xs[1] - xs[0];

        let mut acc: std::collections::BTreeMap<&str, Accum> = Default::default();
        let mut iii_sides = (Accum::new(), Accum::new());
        for row in &profile {
            if (row.t - t).abs() > 1e-6 * t.max(1.0) || row.extrapolated {
                continue;
            }
            if !win.contains(&row.sector, row.x, row.t) {
                continue;
            }
            let u_sim = interp_uniform(xs[0], h, us, row.x);
            let gap = u_sim - row.u;
            let key = SECTOR_ORDER.iter().find(|&&s| s == row.sector);
            if let Some(&key) = key {
                acc.entry(key).or_insert_with(Accum::new).push(gap, u_sim);
                if key == "III" {
                    let side = if row.x < row.t { &mut iii_sides.0 } else { &mut iii_sides.1 };
                    side.push(gap, u_sim);
                }
            }
        }
        if iii_sides.0.n > 0 && iii_sides.1.n > 0 && iii_sides.0.max_gap > iii_sides.1.max_gap {
            iii_left_worse = true;
        }
        for (sector, a) in &acc {
            let l2 = a.l2_abs();
            metrics.push(json!({
                "t": t,
                "sector": sector,
                "n": a.n,
                "l2_abs": jnum(l2),
                "linf_abs": jnum(a.max_gap),
                "l2_rel": jnum(Accum::rel(l2, (a.sum_ref2 / a.n.max(1) as f64).sqrt())),
                "linf_rel": jnum(Accum::rel(a.max_gap, a.max_ref)),
                "linf_abs_sqrt_t": jnum(a.max_gap * t.sqrt()),
            }));
            per_sector.entry(sector.to_string()).or_default().push((t, a.max_gap));
        }
    }

    // Decay trend: slope of ln(gap) against ln(t) per sector.
    let mut trend = serde_json::Map::new();
    for (sector, pts) in &per_sector {
        if pts.len() < 2 || pts.iter().any(|&(_, g)| g <= 0.0) {
            continue;
        }
        let n = pts.len() as f64;
        let (sx, sy, sxx, sxy) = pts.iter().fold((0.0, 0.0, 0.0, 0.0), |(a, b, c, d), &(t, g)| {
            let (x, y) = (t.ln(), g.ln());
            (a + x, b + y, c + x * x, d + x * y)
        });
        let slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
        trend.insert(sector.clone(), jnum(-slope));
    }

    let csv_path = derived(&report_path, "_metrics.csv");
    {
        use std::io::Write;
        let mut out = std::io::BufWriter::new(std::fs::File::create(&csv_path)?);
        writeln!(out, "# data_hash = {asym_hash}")?;
        writeln!(out, "t,sector,n,l2_abs,linf_abs,linf_abs_sqrt_t")?;
        for m in &metrics {
            writeln!(
                out,
                "{},{},{},{},{},{}",
                fmt_float(m["t"].as_f64().unwrap()),
                m["sector"].as_str().unwrap(),
                m["n"],
                fmt_float(m["l2_abs"].as_f64().unwrap_or(f64::NAN)),
                fmt_float(m["linf_abs"].as_f64().unwrap_or(f64::NAN)),
                fmt_float(m["linf_abs_sqrt_t"].as_f64().unwrap_or(f64::NAN)),
            )?;
        }
    }

    write_json(
        &report_path,
        &json!({
            "command": "compare",
            "sim": sim_dir.display().to_string(),
            "asym": asym_path.display().to_string(),
            "data_hash": asym_hash,
            "times": times,
            "windows": {
                "I": [win.i_lo, win.i_hi],
                "III_halfwidth_t13": win.iii_halfwidth,
                "IV": [win.iv_lo, win.iv_hi],
                "V": [win.v_lo, win.v_hi],
            },
            "metrics": metrics,
            "decay_trend": trend,
            "sector_iii_left_slow": iii_left_worse,
            "metrics_csv": csv_path.display().to_string(),
        }),
    )
}

// ---------------------------------------------------------------------------
// blowup
// ---------------------------------------------------------------------------

pub fn cmd_blowup(ov: &Overlay, ray: Option<PathBuf>, report: Option<PathBuf>) -> Result<()> {
    let ray_path = ov.path_req(ray, "ray")?;
    let report = ov.path_req(report, "report")?;
    check_exists(&ray_path)?;
    let data = io::read_csv(&ray_path, &["tau", "re_r1", "im_r1"])?;
    let samples: Vec<RaySample> = (0..data.columns[0].len())
        .map(|i| RaySample {
            tau: data.columns[0][i],
            r1: Complex64::new(data.columns[1][i], data.columns[2][i]),
            converged: true,
        })
        .collect();
    let window = (
        ov.f64(None, "tau_min", DEFAULT_BLOWUP_WINDOW.0)?,
        ov.f64(None, "tau_max", DEFAULT_BLOWUP_WINDOW.1)?,
    );
    let est = estimate_blowup_t(&samples, window)?;
    write_json(
        &report,
        &json!({
            "command": "blowup",
            "ray": ray_path.display().to_string(),
            "data_hash": find_hash_comment(&data.comments),
            "fit_window": [est.fit_window.0, est.fit_window.1],
            "T_est": jnum(est.t_est),
            "model": est.model,
            "residual": jnum(est.residual),
        }),
    )
}

// ---------------------------------------------------------------------------
// painleve
// ---------------------------------------------------------------------------

pub fn cmd_painleve(
    ov: &Overlay,
    ymax: Option<f64>,
    n: Option<usize>,
    out: Option<PathBuf>,
) -> Result<()> {
    let ymax = ov.f64(ymax, "ymax", 10.0)?;
    let n = ov.usize(n, "n", 16001)?;
    let out = ov.path_req(out, "out")?;
    let hm = solve_hastings_mcleod(ymax, n)?;
    let comments = vec![
        format!("y_max = {}", fmt_float(ymax)),
        format!("n = {n}"),
        format!("converged = {}", u8::from(hm.converged)),
    ];
    hm.to_csv(&out, &comments)
}
