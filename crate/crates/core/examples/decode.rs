// One decode, step by step: syndrome, local preprocessing, the flip
// decomposition of the mismatch, and postprocessing.

use qtanner::cli::config::{RunConfig, HAMMING8};
use qtanner::decoder::{flip_log_jsonl, Decoder, DecoderConfig, DecoderKind, Role};
use qtanner::gf2::BitVector;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let code = RunConfig::from_json(HAMMING8)?.build_code()?;
    let config = DecoderConfig { audit: true, ..DecoderConfig::default() };

    for role in [Role::Xerror, Role::Zerror] {
        let decoder = Decoder::new(&code, role, config.clone())?;
        // Errors clustered on two adjacent windows, so the mismatch is non-empty.
        let window = code.complex().window(0);
        let support: Vec<usize> = window[..3].iter().chain(&window[20..24]).map(|&q| q as usize).collect();
        let e = BitVector::from_support(code.n(), &support);
        let s = decoder.syndrome(&e)?;
        let mismatch = decoder.preprocess(&s)?;
        let check = decoder.check_mismatch(&e, &mismatch);
        println!("{role}: |e| = {}, |Z| = {}, identities hold {}", check.e_weight, check.z_weight, check.holds());

        for kind in [DecoderKind::Sequential, DecoderKind::Parallel] {
            let out = decoder.decode_mismatch(&s, &mismatch, kind)?;
            println!(
                "  {kind}: {:?} after {} flips / {} rounds, valid {}",
                out.status,
                out.steps,
                out.rounds,
                out.success() && decoder.is_valid_correction(&e, &out.e_hat)
            );
            assert!(out.audit.clean());
            print!("{}", flip_log_jsonl(&out.flips));
        }
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
