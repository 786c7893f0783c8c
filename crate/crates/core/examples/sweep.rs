// A small Monte Carlo sweep written as CSV.

use qtanner::cli::config::{RunConfig, REF_TINY};
use qtanner::decoder::{Decoder, DecoderKind};
use qtanner::sim::{csv_string, run_trial, sweep, ErrorModel, SweepConfig};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let config = RunConfig::from_json(REF_TINY)?;
    let code = config.build_code()?;
    let decoder = Decoder::new(&code, config.decoder.role, config.decoder.decoder_config())?;

    let record = run_trial(&decoder, &ErrorModel::FixedWeight { w: 1 }, DecoderKind::Sequential, 42)?;
    println!("{}", serde_json::to_string(&record)?);

    let sweep_config = SweepConfig {
        grid: vec![ErrorModel::FixedWeight { w: 1 }, ErrorModel::Iid { p: 0.05 }],
        trials: 50,
        decoders: vec![DecoderKind::Sequential, DecoderKind::Parallel],
        seed: 100,
        record_timing: false,
    };
    let result = sweep(&decoder, &sweep_config)?;
    let csv = csv_string(&result.rows);
    print!("{csv}");
    // Timing off, so a rerun is byte-identical.
    assert_eq!(csv, csv_string(&sweep(&decoder, &sweep_config)?.rows));
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
