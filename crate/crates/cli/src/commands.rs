//! Subcommand implementations.

use std::path::Path;

use anyhow::Context;
use shoaltrack_core::metrics::{evaluate, per_alpha_csv, report_csv, report_table};
use shoaltrack_core::mot::{read_mot_file, write_mot_file, MotKind, Sequence};
use shoaltrack_core::synth::{corrupt, generate_school};
use shoaltrack_core::tracker::run_sequence;
use shoaltrack_core::tuner::{coordinate_ascent, random_search, trial_log_csv, PipelineParams};
use shoaltrack_core::connector::connect;

use crate::config::{resolve_connector, resolve_synth, resolve_tracker, resolve_tune, AppConfig};
use crate::manifest::RunGuard;
use crate::{plot, Cli, Command, ConnectArgs, EvalArgs, PipelineArgs, PlotArgs, SynthArgs, TrackArgs, TuneArgs};

pub fn run(cli: Cli) -> anyhow::Result<()> {
    let cfg = AppConfig::load(cli.config.as_deref())?;
    match &cli.command {
        Command::Synth(args) => cmd_synth(&cfg, args, cli.seed, cli.quiet),
        Command::Track(args) => cmd_track(&cfg, args, cli.quiet),
        Command::Connect(args) => cmd_connect(&cfg, args, cli.quiet),
        Command::Eval(args) => cmd_eval(&cfg, args, cli.quiet),
        Command::Tune(args) => cmd_tune(&cfg, args, cli.seed, cli.quiet),
        Command::Plot(args) => cmd_plot(&cfg, args, cli.quiet),
        Command::Pipeline(args) => cmd_pipeline(&cfg, args, cli.seed, cli.quiet),
    }
}

fn info(quiet: bool, msg: &str) {
    if !quiet {
        eprintln!("{msg}");
    }
}

fn load_tracks(path: &Path) -> anyhow::Result<Sequence<f64>> {
    read_mot_file::<f64>(path, MotKind::Tracks).with_context(|| format!("reading track file {}", path.display()))
}

fn file_stem(path: &Path) -> String {
    path.file_stem().and_then(|s| s.to_str()).unwrap_or("seq").to_string()
}

fn cmd_synth(cfg: &AppConfig, args: &SynthArgs, seed: Option<u64>, quiet: bool) -> anyhow::Result<()> {
    let (school, corruption) = resolve_synth(cfg, args, seed);
    let mut guard = RunGuard::new("synth", Some(school.seed));

    let mut gt = generate_school(&school)?;
    let mut detections = corrupt(&gt, &corruption)?;
    gt.info.name = file_stem(&args.out_gt);
    detections.info.name = file_stem(&args.out_det);
    guard.output_with_sidecar(&args.out_gt);
    write_mot_file(&gt, &args.out_gt)?;
    guard.output_with_sidecar(&args.out_det);
    write_mot_file(&detections, &args.out_det)?;

    info(
        quiet,
        &format!(
            "synth: {} fish x {} frames -> {} ground-truth boxes, {} detections",
            school.n_fish,
            school.frame_count(),
            gt.tracks()?.iter().map(|t| t.points.len()).sum::<usize>(),
            detections.detections()?.len()
        ),
    );
    guard.finish(&serde_json::json!({ "school": school, "corruption": corruption }))?;
    Ok(())
}

fn cmd_track(cfg: &AppConfig, args: &TrackArgs, quiet: bool) -> anyhow::Result<()> {
    let tracker = resolve_tracker(cfg, args)?;
    tracker.validate()?;
    let mut guard = RunGuard::new("track", None);
    guard.input(&args.input);

    let detections = read_mot_file::<f64>(&args.input, MotKind::Detections)
        .with_context(|| format!("reading detection file {}", args.input.display()))?;
    let mut tracks = run_sequence(&detections, &tracker)?;
    tracks.info.name = file_stem(&args.output);
    guard.output_with_sidecar(&args.output);
    write_mot_file(&tracks, &args.output)?;

    info(quiet, &format!("track: {} tracks from {} detections", tracks.tracks()?.len(), detections.detections()?.len()));
    guard.finish(&tracker)?;
    Ok(())
}

fn cmd_connect(cfg: &AppConfig, args: &ConnectArgs, quiet: bool) -> anyhow::Result<()> {
    let connector = resolve_connector(cfg, args);
    connector.validate()?;
    let mut guard = RunGuard::new("connect", None);
    guard.input(&args.input);

    let tracks = load_tracks(&args.input)?;
    let mut repaired = connect(&tracks, &connector)?;
    repaired.info.name = file_stem(&args.output);
    guard.output_with_sidecar(&args.output);
    write_mot_file(&repaired, &args.output)?;

    info(
        quiet,
        &format!("connect: {} tracks in, {} tracks out", tracks.tracks()?.len(), repaired.tracks()?.len()),
    );
    guard.finish(&connector)?;
    Ok(())
}

fn cmd_eval(cfg: &AppConfig, args: &EvalArgs, quiet: bool) -> anyhow::Result<()> {
    let _ = cfg;
    let mut guard = RunGuard::new("eval", None);
    guard.input(&args.gt);
    guard.input(&args.pred);

    let gt = load_tracks(&args.gt)?;
    let pred = load_tracks(&args.pred)?;
    let name = args
        .name
        .clone()
        .or_else(|| args.pred.file_stem().and_then(|s| s.to_str()).map(str::to_string))
        .unwrap_or_else(|| "pred".to_string());
    let report = evaluate(&gt, &pred)?;
    let rows = vec![(name.clone(), report.clone())];

    let table = report_table(&rows);
    print!("{table}");
    let table_path = args.output.clone().unwrap_or_else(|| "eval.txt".into());
    guard.output(&table_path);
    std::fs::write(&table_path, &table)?;
    if let Some(path) = &args.csv {
        guard.output(path);
        std::fs::write(path, report_csv(&rows))?;
    }
    if let Some(path) = &args.per_alpha {
        guard.output(path);
        std::fs::write(path, per_alpha_csv(&report))?;
    }

    info(quiet, &format!("eval: HOTA {:.4} over {} frames", report.hota, gt.frame_count()));
    guard.finish(&serde_json::json!({ "row_name": name }))?;
    Ok(())
}

fn cmd_tune(cfg: &AppConfig, args: &TuneArgs, seed: Option<u64>, quiet: bool) -> anyhow::Result<()> {
    let tune = resolve_tune(cfg, args, seed);
    let space = cfg.search_space();
    let start = PipelineParams { tracker: cfg.tracker.clone(), connector: cfg.connector };
    let mut guard = RunGuard::new("tune", Some(tune.seed));
    guard.input(&args.gt);
    guard.input(&args.det);

    let gt = load_tracks(&args.gt)?;
    let detections = read_mot_file::<f64>(&args.det, MotKind::Detections)
        .with_context(|| format!("reading detection file {}", args.det.display()))?;

    let objective = |params: &PipelineParams| {
        let tracks = run_sequence(&detections, &params.tracker)?;
        let repaired = connect(&tracks, &params.connector)?;
        evaluate(&gt, &repaired)
    };

    let (best, log) = match tune.method.as_str() {
        "coordinate" => coordinate_ascent(objective, &space, &start, tune.max_rounds)?,
        "random" => random_search(objective, &space, &start, tune.n_trials, tune.seed)?,
        other => anyhow::bail!("unknown tune method {other:?} (expected coordinate or random)"),
    };

    guard.output(&args.out_config);
    std::fs::write(&args.out_config, toml::to_string_pretty(&best)?)?;
    guard.output(&args.out_log);
    std::fs::write(&args.out_log, trial_log_csv(&space, &log))?;

    let best_hota = log.iter().filter_map(|t| t.hota()).fold(f64::NEG_INFINITY, f64::max);
    info(quiet, &format!("tune: {} trials, best HOTA {best_hota:.4}", log.len()));
    guard.finish(&serde_json::json!({
        "method": tune.method,
        "max_rounds": tune.max_rounds,
        "n_trials": tune.n_trials,
        "seed": tune.seed,
        "space": space,
        "start": start,
    }))?;
    Ok(())
}

fn cmd_plot(cfg: &AppConfig, args: &PlotArgs, quiet: bool) -> anyhow::Result<()> {
    let _ = cfg;
    let mut guard = RunGuard::new("plot", None);
    guard.input(&args.input);

    let tracks = load_tracks(&args.input)?;
    guard.output(&args.output);
    std::fs::write(&args.output, plot::render_svg(&tracks))?;
    if let Some(path) = &args.csv {
        guard.output(path);
        std::fs::write(path, plot::centers_csv(&tracks))?;
    }

    info(quiet, &format!("plot: {} tracks rendered", tracks.tracks()?.len()));
    guard.finish(&serde_json::json!({}))?;
    Ok(())
}

fn cmd_pipeline(cfg: &AppConfig, args: &PipelineArgs, seed: Option<u64>, quiet: bool) -> anyhow::Result<()> {
    std::fs::create_dir_all(&args.out_dir)
        .with_context(|| format!("creating output directory {}", args.out_dir.display()))?;
    let dir = &args.out_dir;

    // Each stage runs exactly as its standalone subcommand would with the
    // same config file and seed, so the artifacts match a manual run.
    let synth_args = SynthArgs {
        out_gt: dir.join("gt.txt"),
        out_det: dir.join("det.txt"),
        ..SynthArgs::default()
    };
    cmd_synth(cfg, &synth_args, seed, quiet)?;

    let track_args = TrackArgs {
        input: dir.join("det.txt"),
        output: dir.join("tracks.txt"),
        ..TrackArgs::default()
    };
    cmd_track(cfg, &track_args, quiet)?;

    let connect_args = ConnectArgs {
        input: dir.join("tracks.txt"),
        output: dir.join("connected.txt"),
        ..ConnectArgs::default()
    };
    cmd_connect(cfg, &connect_args, quiet)?;

    let eval_args = EvalArgs {
        gt: dir.join("gt.txt"),
        pred: dir.join("connected.txt"),
        output: Some(dir.join("eval.txt")),
        csv: Some(dir.join("eval.csv")),
        per_alpha: Some(dir.join("per_alpha.csv")),
        name: None,
    };
    cmd_eval(cfg, &eval_args, quiet)?;

    let mut guard = RunGuard::new("pipeline", seed);
    let summary = dir.join("pipeline.txt");
    std::fs::write(&summary, "synth -> track -> connect -> eval\n")?;
    guard.output(&summary);
    guard.finish(&serde_json::json!({
        "school": cfg.synth,
        "corruption": cfg.corruption,
        "tracker": cfg.tracker,
        "connector": cfg.connector,
        "out_dir": dir.display().to_string(),
    }))?;
    Ok(())
}
