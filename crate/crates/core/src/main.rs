use std::process::ExitCode;

use mcik::cli::{emit_csv, parse_args, write_csv};
use mcik::monte_carlo::BerPoint;

fn summary(points: &[BerPoint]) {
    eprintln!(
        "{:>8}  {:>12}  {:>12}  {:>10}  {:>10}",
        "SNR(dB)", "bound", "simulated", "stderr", "blocks"
    );
    for p in points {
        let bound = p.bound.map_or("-".to_string(), |b| format!("{b:.4e}"));
        let (sim, se, blocks) = match &p.sim {
            Some(s) => (
                format!("{:.4e}", s.ber),
                format!("{:.2e}", s.stderr),
                s.blocks.to_string(),
            ),
            None => ("-".into(), "-".into(), "-".into()),
        };
        eprintln!("{:>8.2}  {bound:>12}  {sim:>12}  {se:>10}  {blocks:>10}", p.snr_db);
    }
}

fn main() -> ExitCode {
    let plan = match parse_args(std::env::args_os()) {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let points = match plan.execute() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::FAILURE;
        }
    };
    let manifest = plan.manifest(&chrono::Utc::now().to_rfc3339());
    let written = match &plan.out {
        Some(path) => emit_csv(path, &points, &manifest),
        None => write_csv(std::io::stdout().lock(), &points, &manifest),
    };
    if let Err(e) = written {
        eprintln!("error: {e}");
        return ExitCode::FAILURE;
    }
    summary(&points);
    ExitCode::SUCCESS
}
