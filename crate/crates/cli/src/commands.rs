use std::collections::BTreeMap;
use std::fs;
use std::path::PathBuf;
use std::time::Instant;

use anyhow::anyhow;
use lpf_core::analysis::{dis_coef_from_coeffs, marginal_csv, mean_spectrum_delta, pair_coefficients};
use lpf_core::dataset::{sha256_hex, FailureRecord, MANIFEST_FILE};
use lpf_core::io::{scan_dataset, DatasetEntry};
use lpf_core::pipeline::Lowpass;
use lpf_core::{
    build_grid, center, forward_sht, load_cloud, make_defense_dataset, power_spectrum, project, sor, srs,
    CloudFormat, DefenseDatasetJob, FilterSpec, PerturbKind, PerturbSpec, PointCloud, SorParams,
};
use rand::Rng as _;
use rayon::prelude::*;
use serde::Serialize;

use crate::batch::{require_exists, run_clouds, Failure, Status};
use crate::{AnalyzeCmd, DatasetCmd, FilterCmd, InfoCmd, PerturbCmd, PerturbKindArg, PreprocessCmd};

#[derive(Serialize)]
struct FilterJob {
    input: PathBuf,
    output: PathBuf,
    filter: FilterSpec,
    bandlimit: usize,
    n_target: usize,
    seed: u64,
}

pub fn filter(cmd: FilterCmd, seed: u64) -> Result<Status, Failure> {
    let spec = cmd.filter.required()?;
    if cmd.n == 0 {
        return Err(Failure::usage("--n must be at least 1"));
    }
    let lowpass = Lowpass::new(spec, cmd.lmax)?;
    let job = FilterJob {
        input: cmd.io.input.clone(),
        output: cmd.io.output.clone(),
        filter: spec,
        bandlimit: cmd.lmax,
        n_target: cmd.n,
        seed,
    };
    run_clouds(&cmd.io.input, &cmd.io.output, cmd.io.format, seed, "lowpass", &job, |cloud, rng| {
        lowpass.apply_with(cloud, cmd.n, rng)
    })
}

pub fn dataset(cmd: DatasetCmd, seed: u64) -> Result<Status, Failure> {
    let job = DefenseDatasetJob {
        input_root: cmd.input,
        output_root: cmd.output,
        mode: cmd.mode,
        filter: cmd.filter.required()?,
        bandlimit: cmd.lmax,
        n_target: cmd.n,
        seed,
        format: cmd.format,
    };
    job.validate()?;
    require_exists(&job.input_root)?;
    if scan_dataset(&job.input_root)?.is_empty() {
        return Err(Failure::usage(format!("no cloud files under {}", job.input_root.display())));
    }

    let start = Instant::now();
    let manifest = make_defense_dataset(&job)?;
    let sources: std::collections::BTreeSet<_> = manifest.outputs.iter().map(|o| o.src.as_str()).collect();
    println!(
        "{} clouds processed, {} outputs, {} failures in {:.2}s",
        sources.len(),
        manifest.outputs.len(),
        manifest.failures.len(),
        start.elapsed().as_secs_f64()
    );
    for f in &manifest.failures {
        eprintln!("failed: {}: {}", f.src, f.error);
    }
    Ok(Status::from_failures(&manifest.failures))
}

#[derive(Serialize)]
struct AnalyzeJob {
    org: PathBuf,
    adv: PathBuf,
    bandlimit: usize,
    eps_rel: f64,
}

#[derive(Serialize)]
struct WrittenFile {
    path: String,
    digest: String,
}

#[derive(Serialize)]
struct AnalyzeManifest<'a> {
    job: &'a AnalyzeJob,
    pairs: Vec<String>,
    outputs: Vec<WrittenFile>,
    failures: Vec<FailureRecord>,
}

pub fn analyze(cmd: AnalyzeCmd) -> Result<Status, Failure> {
    build_grid(cmd.lmax)?;
    if !(cmd.eps_rel.is_finite() && cmd.eps_rel >= 0.0) {
        return Err(Failure::usage(format!("--eps-rel must be >= 0, got {}", cmd.eps_rel)));
    }
    require_exists(&cmd.org)?;
    require_exists(&cmd.adv)?;
    let org: BTreeMap<String, DatasetEntry> = scan_dataset(&cmd.org)?.into_iter().map(|e| (e.relative.clone(), e)).collect();
    let adv: BTreeMap<String, DatasetEntry> = scan_dataset(&cmd.adv)?.into_iter().map(|e| (e.relative.clone(), e)).collect();

    let mut failures = Vec::new();
    for rel in org.keys().filter(|k| !adv.contains_key(*k)) {
        failures.push(FailureRecord {
            src: rel.clone(),
            error: format!("missing pair: not found under {}", cmd.adv.display()),
        });
    }
    for rel in adv.keys().filter(|k| !org.contains_key(*k)) {
        failures.push(FailureRecord {
            src: rel.clone(),
            error: format!("missing pair: not found under {}", cmd.org.display()),
        });
    }

    let matched: Vec<(&String, &DatasetEntry, &DatasetEntry)> = org
        .iter()
        .filter_map(|(rel, o)| adv.get(rel).map(|a| (rel, o, a)))
        .collect();
    let loaded: Vec<Result<(String, PointCloud, PointCloud), FailureRecord>> = matched
        .par_iter()
        .map(|(rel, o, a)| {
            let load = || Ok::<_, lpf_core::Error>((o.load()?, a.load()?));
            load()
                .map(|(o, a)| ((*rel).clone(), o, a))
                .map_err(|e| FailureRecord {
                    src: (*rel).clone(),
                    error: e.to_string(),
                })
        })
        .collect();
    let mut names = Vec::new();
    let (mut orgs, mut advs) = (Vec::new(), Vec::new());
    for r in loaded {
        match r {
            Ok((rel, o, a)) => {
                names.push(rel);
                orgs.push(o);
                advs.push(a);
            }
            Err(f) => failures.push(f),
        }
    }
    failures.sort_by(|a, b| a.src.cmp(&b.src));
    for f in &failures {
        eprintln!("{}: {}", f.src, f.error);
    }
    if orgs.is_empty() {
        return Err(Failure::usage("no usable (original, perturbed) pairs"));
    }

    let coeffs = pair_coefficients(&orgs, &advs, cmd.lmax)?;
    let map = dis_coef_from_coeffs(&coeffs, cmd.eps_rel)?;
    let delta = mean_spectrum_delta(&coeffs)?;

    fs::create_dir_all(&cmd.output).map_err(|e| Failure::Io(anyhow!("creating {}: {e}", cmd.output.display())))?;
    let mut outputs = Vec::new();
    for (name, text) in [("dis_coef.csv", map.to_csv()), ("marginal.csv", marginal_csv(&delta))] {
        let path = cmd.output.join(name);
        fs::write(&path, &text).map_err(|e| Failure::Io(anyhow!("writing {}: {e}", path.display())))?;
        outputs.push(WrittenFile {
            path: name.to_string(),
            digest: sha256_hex(text.as_bytes()),
        });
    }
    let job = AnalyzeJob {
        org: cmd.org,
        adv: cmd.adv,
        bandlimit: cmd.lmax,
        eps_rel: cmd.eps_rel,
    };
    let status = Status::from_failures(&failures);
    let manifest = AnalyzeManifest {
        job: &job,
        pairs: names,
        outputs,
        failures,
    };
    let mut text = serde_json::to_string_pretty(&manifest).map_err(|e| Failure::Io(e.into()))?;
    text.push('\n');
    let path = cmd.output.join(MANIFEST_FILE);
    fs::write(&path, text).map_err(|e| Failure::Io(anyhow!("writing {}: {e}", path.display())))?;
    println!("{} pairs analyzed, {} problems", manifest.pairs.len(), manifest.failures.len());
    Ok(status)
}

#[derive(Serialize)]
struct PreprocessJob {
    input: PathBuf,
    output: PathBuf,
    sor: Option<SorParams>,
    srs_drop: Option<usize>,
    filter: Option<FilterSpec>,
    bandlimit: usize,
    n_target: Option<usize>,
    seed: u64,
}

pub fn preprocess(cmd: PreprocessCmd, seed: u64) -> Result<Status, Failure> {
    let sor_params = (cmd.sor || cmd.sor_k.is_some() || cmd.sor_alpha.is_some()).then(|| {
        let d = SorParams::default();
        SorParams {
            k: cmd.sor_k.unwrap_or(d.k),
            alpha: cmd.sor_alpha.unwrap_or(d.alpha),
        }
    });
    if let Some(p) = &sor_params {
        p.validate()?;
    }
    let spec = cmd.filter.spec()?;
    let lowpass = spec.map(|f| Lowpass::new(f, cmd.lmax)).transpose()?;
    if sor_params.is_none() && cmd.srs_drop.is_none() && lowpass.is_none() {
        return Err(Failure::usage("nothing to do: pass --sor, --srs-drop or a filter"));
    }
    if cmd.n == Some(0) {
        return Err(Failure::usage("--n must be at least 1"));
    }
    let job = PreprocessJob {
        input: cmd.io.input.clone(),
        output: cmd.io.output.clone(),
        sor: sor_params,
        srs_drop: cmd.srs_drop,
        filter: spec,
        bandlimit: cmd.lmax,
        n_target: cmd.n,
        seed,
    };
    run_clouds(&cmd.io.input, &cmd.io.output, cmd.io.format, seed, "preprocessed", &job, |cloud, rng| {
        let mut current = cloud.clone();
        if let Some(p) = &sor_params {
            current = sor(&current, p)?;
        }
        if let Some(n_drop) = cmd.srs_drop {
            current = srs(&current, n_drop, rng.random())?;
        }
        if let Some(lp) = &lowpass {
            let n = cmd.n.unwrap_or(current.len());
            current = lp.apply_with(&current, n, rng)?;
        }
        Ok(current)
    })
}

#[derive(Serialize)]
struct PerturbJob {
    input: PathBuf,
    output: PathBuf,
    kind: PerturbKind,
    seed: u64,
}

pub fn perturb(cmd: PerturbCmd, seed: u64) -> Result<Status, Failure> {
    let need = |v: Option<f64>, flag: &str| v.ok_or_else(|| Failure::usage(format!("{flag} is required for this kind")));
    let count = || cmd.count.ok_or_else(|| Failure::usage("--count is required for this kind"));
    let kind = match cmd.kind {
        PerturbKindArg::ShiftGaussian => PerturbKind::ShiftGaussian {
            sigma: need(cmd.sigma, "--sigma")?,
        },
        PerturbKindArg::AddOutliers => PerturbKind::AddOutliers {
            count: count()?,
            r_min: need(cmd.r_min, "--r-min")?,
            r_max: need(cmd.r_max, "--r-max")?,
        },
        PerturbKindArg::DropRandom => PerturbKind::DropRandom { count: count()? },
    };
    // cloud-size checks happen per file; everything else is checked now
    PerturbSpec { kind, seed }.validate(usize::MAX)?;
    let job = PerturbJob {
        input: cmd.io.input.clone(),
        output: cmd.io.output.clone(),
        kind,
        seed,
    };
    run_clouds(&cmd.io.input, &cmd.io.output, cmd.io.format, seed, "perturbed", &job, |cloud, rng| {
        lpf_core::perturb(cloud, &PerturbSpec { kind, seed: rng.random() })
    })
}

pub fn info(cmd: InfoCmd) -> Result<Status, Failure> {
    require_exists(&cmd.input)?;
    if cmd.input.is_dir() {
        let entries = scan_dataset(&cmd.input)?;
        let mut per_label: BTreeMap<&str, usize> = BTreeMap::new();
        for e in &entries {
            *per_label.entry(e.label.as_deref().unwrap_or(".")).or_default() += 1;
        }
        println!("{} cloud files in {} classes", entries.len(), per_label.len());
        for (label, n) in per_label {
            println!("  {label}: {n}");
        }
        return Ok(Status::Done);
    }

    let format = CloudFormat::from_path(&cmd.input)
        .ok_or_else(|| Failure::usage(format!("cannot tell the format of {}", cmd.input.display())))?;
    let cloud = load_cloud(&cmd.input, format)?;
    let c = cloud.centroid();
    println!("format: {}", format.extension());
    println!("points: {}", cloud.len());
    println!("centroid: {} {} {}", c.0[0], c.0[1], c.0[2]);
    println!("bounding radius: {}", cloud.bounding_radius(c));
    if let Some(l) = cmd.lmax {
        let (centered, _) = center(&cloud)?;
        let coeffs = forward_sht(&project(&centered, &build_grid(l)?)?)?;
        println!("l,power");
        for (deg, p) in power_spectrum(&coeffs).0.iter().enumerate() {
            println!("{deg},{p}");
        }
    }
    Ok(Status::Done)
}
