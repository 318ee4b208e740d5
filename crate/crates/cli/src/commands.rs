use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::Context;
use burstnoise::analysis::{
    background_kv, background_stats, detect_bursts, estimate_profile, events_csv, impulse_mask,
    impulse_mask_windowed, AnalysisConfig, BurstConfig, ImpulseMask, SplitConfig,
};
use burstnoise::coding::{peg_regular, write_alist, LdpcCode};
use burstnoise::fsutil::{ensure_dir, write_atomic, write_string_atomic};
use burstnoise::harness::{run_ber, write_ber_csv, DetectorKind, ExperimentConfig, SnrConvention};
use burstnoise::kvtext::KvDocument;
use burstnoise::recording::{load_iq, write_iq, IqFormat};
use burstnoise::synth::{synthesize_noise_blocked, SampleMode};
use burstnoise::{MiddletonParams, ModelProfile};

use crate::plotdata;
use crate::{
    usage, AnalyzeArgs, BerArgs, CodeGenArgs, Command, DetectionArgs, EstimateArgs, Failure, InputArgs,
    ProfileArgs, SynthArgs,
};

type Outcome = Result<(), Failure>;

const PEG_SEED_OFFSET: u64 = 0x5045_4700;

pub fn dispatch(command: Command) -> Outcome {
    match command {
        Command::Analyze(a) => analyze(a),
        Command::Estimate(a) => estimate(a),
        Command::Synth(a) => synth(a),
        Command::Ber(a) => ber(a),
        Command::CodeGen(a) => code_gen(a),
        Command::Profile(a) => profile(a),
    }
}

fn with_suffix(path: &Path, suffix: &str) -> PathBuf {
    let mut s = OsString::from(path.as_os_str());
    s.push(suffix);
    PathBuf::from(s)
}

fn parse_format(tag: &str) -> Result<IqFormat, Failure> {
    tag.parse().map_err(|_| usage(format!("unknown format `{tag}` (expected f32le, s16le or csv)")))
}

fn check_rate(rate: f64) -> Outcome {
    if !(rate > 0.0 && rate.is_finite()) {
        return Err(usage(format!("--rate must be positive, got {rate}")));
    }
    Ok(())
}

fn burst_config(d: &DetectionArgs) -> Result<BurstConfig, Failure> {
    let ok = |x: f64| x >= 0.0 && x.is_finite();
    if !ok(d.min_duration) || !ok(d.gap_tolerance) || !d.bridge.is_none_or(ok) {
        return Err(usage("durations must be finite and nonnegative"));
    }
    if !(d.alpha > 0.0 && d.alpha.is_finite()) {
        return Err(usage(format!("--alpha must be positive, got {}", d.alpha)));
    }
    if d.window == Some(0) {
        return Err(usage("--window must be at least 1"));
    }
    Ok(BurstConfig {
        min_duration_s: d.min_duration,
        gap_tolerance_s: d.gap_tolerance,
        bridge_s: d.bridge,
    })
}

fn load_input(input: &InputArgs, format: IqFormat) -> anyhow::Result<burstnoise::IqRecording> {
    load_iq(&input.input, format, input.rate).with_context(|| format!("reading {}", input.input.display()))
}

fn load_profile(spec: &str) -> anyhow::Result<ModelProfile> {
    if spec == "table1" {
        return Ok(ModelProfile::table1());
    }
    let text = fs::read_to_string(spec).with_context(|| format!("reading profile {spec}"))?;
    let doc = KvDocument::parse(&text).with_context(|| format!("parsing profile {spec}"))?;
    ModelProfile::from_kv(&doc).with_context(|| format!("profile {spec}"))
}

fn input_kv(input: &InputArgs, format: IqFormat) -> KvDocument {
    let mut doc = KvDocument::new();
    doc.set("path", input.input.display())
        .set("format", format)
        .set_f64("sample_rate_hz", input.rate);
    doc
}

fn analyze(args: AnalyzeArgs) -> Outcome {
    let format = parse_format(&args.input.format)?;
    check_rate(args.input.rate)?;
    let bursts_cfg = burst_config(&args.detection)?;
    let rec = load_input(&args.input, format)?;
    let mask = match args.detection.window {
        Some(w) => impulse_mask_windowed(&rec, args.detection.alpha, w)?,
        None => impulse_mask(&rec, args.detection.alpha)?,
    };
    let bursts = detect_bursts(&rec, &mask, &bursts_cfg)?;
    let mut in_burst = vec![false; rec.len()];
    for b in &bursts {
        in_burst[b.start..b.end].fill(true);
    }
    let background = background_stats(&rec, &ImpulseMask::from_flags(in_burst))?;

    let mut doc = KvDocument::new();
    doc.comment("burstnoise analyze")
        .set("format", "burstnoise-analysis/1")
        .set("samples", rec.len())
        .set_f64("rms", mask.segments.first().map_or(f64::NAN, |s| s.rms))
        .set_f64("threshold", mask.threshold())
        .set("flagged", mask.flagged())
        .set("burst_count", bursts.len())
        .set("burst_samples", bursts.iter().map(|b| b.len()).sum::<usize>());
    doc.extend_prefixed("background", &background_kv(&background));
    doc.extend_prefixed("input", &input_kv(&args.input, format));
    let mut cfg = KvDocument::new();
    cfg.set_f64("alpha", args.detection.alpha)
        .set(
            "threshold_window",
            args.detection.window.map_or("global".to_string(), |w| w.to_string()),
        )
        .set_f64("min_duration_s", bursts_cfg.min_duration_s)
        .set_f64("gap_tolerance_s", bursts_cfg.gap_tolerance_s)
        .set("bridge_s", bursts_cfg.bridge_s.map_or("none".to_string(), |b| b.to_string()));
    doc.extend_prefixed("config", &cfg);

    let bursts_path = args.bursts.unwrap_or_else(|| with_suffix(&args.out, ".bursts.csv"));
    write_string_atomic(&bursts_path, &events_csv(&bursts))?;
    if let Some(dir) = &args.plotdata {
        ensure_dir(dir)?;
        plotdata::background_histograms(dir, &background)?;
    }
    write_string_atomic(&args.out, &doc.render())?;
    Ok(())
}

fn estimate(args: EstimateArgs) -> Outcome {
    let format = parse_format(&args.input.format)?;
    check_rate(args.input.rate)?;
    let bursts = burst_config(&args.detection)?;
    let feature = args.feature.parse().map_err(|e| usage(format!("{e}")))?;
    if args.k == 0 {
        return Err(usage("--k must be at least 1"));
    }
    if !args.no_split && !(args.split_penalty >= 0.0 && args.split_penalty.is_finite()) {
        return Err(usage("--split-penalty must be finite and nonnegative"));
    }
    let config = AnalysisConfig {
        alpha: args.detection.alpha,
        threshold_window: args.detection.window,
        bursts,
        split: (!args.no_split).then_some(SplitConfig {
            penalty: args.split_penalty,
            min_segment: args.split_min_segment.max(1),
        }),
        clusters: args.k,
        feature,
        ..AnalysisConfig::default()
    };
    let rec = load_input(&args.input, format)?;
    let report = estimate_profile(&rec, &config)?;

    let mut doc = report.to_kv();
    doc.comment("burstnoise estimate");
    doc.extend_prefixed("input", &input_kv(&args.input, format));
    let bursts_path = args.bursts.unwrap_or_else(|| with_suffix(&args.out, ".bursts.csv"));
    write_string_atomic(&bursts_path, &report.events_csv())?;
    if let Some(dir) = &args.plotdata {
        ensure_dir(dir)?;
        plotdata::background_histograms(dir, &report.background)?;
        plotdata::burst_clusters(dir, &report, config.feature)?;
    }
    write_string_atomic(&args.out, &doc.render())?;
    Ok(())
}

fn synth_format(args: &SynthArgs) -> Result<IqFormat, Failure> {
    match &args.format {
        Some(tag) => parse_format(tag),
        None => {
            let ext = args.out.extension().and_then(|e| e.to_str()).unwrap_or("");
            parse_format(ext).map_err(|_| usage("--format is required when the output extension is not f32le, s16le or csv"))
        }
    }
}

fn synth(args: SynthArgs) -> Outcome {
    let format = synth_format(&args)?;
    let mode = match args.mode.as_str() {
        "real" => SampleMode::Real,
        "complex" => SampleMode::Complex,
        other => return Err(usage(format!("unknown mode `{other}` (expected real or complex)"))),
    };
    if args.n == 0 || args.block_len == 0 {
        return Err(usage("--n and --block-len must be at least 1"));
    }
    check_rate(args.rate)?;
    let profile = load_profile(&args.profile)?;
    let noise = synthesize_noise_blocked(&profile, args.n, args.block_len, args.seed, mode)?;

    let mut meta = profile.to_kv();
    meta.comment("burstnoise synth")
        .set("format", "burstnoise-synth/1")
        .set("seed", args.seed)
        .set("samples", args.n)
        .set("mode", &args.mode)
        .set("block_len", args.block_len)
        .set_f64("sample_rate_hz", args.rate)
        .set("sample_format", format)
        .set("profile_source", &args.profile);

    if let Some(dir) = &args.plotdata {
        ensure_dir(dir)?;
        plotdata::synthetic_trace(dir, &noise, args.plot_len.min(args.n), args.rate, args.seed)?;
    }
    let rec = noise.into_recording(args.rate)?;
    write_iq(&rec, &args.out, format)?;
    write_string_atomic(&with_suffix(&args.out, ".meta"), &meta.render())?;
    Ok(())
}

fn ber(args: BerArgs) -> Outcome {
    let convention: SnrConvention = args.convention.parse().map_err(|e| usage(format!("{e}")))?;
    let detectors = args
        .detector
        .iter()
        .map(|d| d.parse::<DetectorKind>().map_err(|e| usage(format!("{e}"))))
        .collect::<Result<Vec<_>, _>>()?;
    if detectors.is_empty() {
        return Err(usage("--detector needs at least one entry"));
    }
    if args.snr.iter().any(|s| !s.is_finite()) {
        return Err(usage("--snr values must be finite"));
    }
    if args.max_codewords == 0 || args.target_errors == 0 {
        return Err(usage("--max-codewords and --target-errors must be at least 1"));
    }
    let profile = load_profile(&args.profile)?;
    let code = match &args.code {
        Some(path) => LdpcCode::load_alist(path).with_context(|| format!("loading code {}", path.display()))?,
        None => peg_regular(args.peg_n, 3, 6, args.seed ^ PEG_SEED_OFFSET)?,
    };

    let mut points = Vec::new();
    for detector in detectors {
        let mut config = ExperimentConfig::new(profile.clone(), code.clone(), detector, args.snr.clone(), args.seed);
        config.convention = convention;
        config.max_codewords = args.max_codewords;
        config.target_errors = args.target_errors;
        config.max_iters = args.max_iters;
        points.extend(run_ber(&config)?);
    }
    if let Some(dir) = &args.plotdata {
        ensure_dir(dir)?;
        plotdata::ber_curves(dir, &points)?;
    }
    write_atomic(&args.out, |w| write_ber_csv(w, &points))?;

    let mut meta = profile.to_kv();
    meta.comment("burstnoise ber")
        .set("format", "burstnoise-ber/1")
        .set("seed", args.seed)
        .set("code", args.code.as_ref().map_or(format!("peg n={} dv=3 dc=6", args.peg_n), |p| p.display().to_string()))
        .set("code_n", code.n())
        .set("code_k", code.k())
        .set("convention", convention)
        .set("max_codewords", args.max_codewords)
        .set("target_errors", args.target_errors)
        .set("max_iters", args.max_iters)
        .set("profile_source", &args.profile);
    write_string_atomic(&with_suffix(&args.out, ".meta"), &meta.render())?;
    Ok(())
}

fn code_gen(args: CodeGenArgs) -> Outcome {
    if args.n == 0 || args.dv == 0 || args.dc == 0 {
        return Err(usage("--n, --dv and --dc must be at least 1"));
    }
    if !(args.n * args.dv).is_multiple_of(args.dc) {
        return Err(usage("n·dv must be a multiple of dc"));
    }
    let code = peg_regular(args.n, args.dv, args.dc, args.seed)?;
    write_string_atomic(&args.out, &write_alist(&code))?;
    eprintln!(
        "n={} k={} rank={} seed={} -> {}",
        code.n(),
        code.k(),
        code.rank(),
        args.seed,
        args.out.display()
    );
    Ok(())
}

fn profile(args: ProfileArgs) -> Outcome {
    let doc = match args.preset.as_str() {
        "table1" => {
            let mut p = ModelProfile::table1();
            if let Some(r) = args.r {
                p = p.with_correlation(r)?;
            }
            p.to_kv()
        }
        "middleton" => {
            let (Some(a), Some(gamma), Some(power), Some(states)) = (args.a, args.gamma, args.power, args.states) else {
                return Err(usage("middleton preset needs --a, --gamma, --power and --states"));
            };
            let params = MiddletonParams::new(a, gamma, power, states)?;
            let mut doc = params.profile(args.r.unwrap_or(0.0))?.to_kv();
            doc.extend_prefixed("middleton", &params.to_kv());
            doc
        }
        other => return Err(usage(format!("unknown preset `{other}` (expected table1 or middleton)"))),
    };
    write_string_atomic(&args.out, &doc.render())?;
    Ok(())
}
