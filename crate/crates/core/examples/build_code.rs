// Assembling a quantum Tanner code from a JSON configuration.

use qtanner::cli::config::{RunConfig, REF_SMALL};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let config = RunConfig::from_json(REF_SMALL)?;
    let code = config.build_code()?;
    let p = code.params();
    println!("[[n = {}, k = {}]], rank H_X = {}, rank H_Z = {}", p.n, p.k, p.rank_x, p.rank_z);
    println!("rate bound {:?}, holds {}", p.rate_bound, p.rate_bound_ok);
    assert!(code.h_x().mul_transpose(code.h_z()).is_zero());

    let summary = code.summary(200, 7);
    println!("{}", serde_json::to_string_pretty(&summary)?);

    // The same configuration with random local codes.
    let mut value: serde_json::Value = serde_json::from_str(REF_SMALL)?;
    value["local_codes"] = serde_json::json!({ "k_a": 2, "k_b": 2, "seed_a": 5, "seed_b": 6 });
    let random = RunConfig::from_json(&value.to_string())?.build_code()?;
    println!("random local codes: k = {}", random.k());

    // Invalid input is reported against the offending field.
    value["delta"] = 3.into();
    if let Err(e) = RunConfig::from_json(&value.to_string()) {
        println!("rejected: {e}");
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
