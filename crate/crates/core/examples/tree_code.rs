//! The outer tree code on its own: encode payloads with the 32-slot profile,
//! merge them through an ideal OR channel with injected false alarms, and
//! stitch them back together.
//!
//!     cargo run --release --example tree_code

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use ura_core::tree::{or_mac_combine, outer_encode, tree_decode, ParityProfile, Payload, TreeCodebook};

fn main() -> anyhow::Result<()> {
    let mut parity = vec![0];
    parity.extend(std::iter::repeat_n(9, 28));
    parity.extend([12, 12, 12]);
    let profile = ParityProfile::from_parity(12, &parity)?;
    println!(
        "B = {} info bits, P = {} parity bits, R_out = {}",
        profile.payload_bits(),
        profile.total_parity(),
        profile.outer_rate()
    );
    let codebook = TreeCodebook::new(profile, 42);
    let mut rng = ChaCha8Rng::seed_from_u64(0);

    let payloads: Vec<Payload> = (0..200).map(|_| rng.random::<Payload>() >> 32).collect();
    let blocks = payloads.iter().map(|&p| outer_encode(p, &codebook)).collect::<Result<Vec<_>, _>>()?;
    println!("first payload {:024x} -> slot words {:03x?}", payloads[0], &blocks[0][..4]);

    for extra in [0, 20, 60] {
        let mut lists = or_mac_combine(&blocks, 32);
        for set in &mut lists.0 {
            for _ in 0..extra {
                set.insert(rng.random_range(0..4096));
            }
        }
        let decoded = tree_decode(&lists, &codebook)?;
        let found = payloads.iter().filter(|p| decoded.contains(p)).count();
        println!("{extra:>2} false alarms per slot: {found}/200 recovered, {} spurious", decoded.len() - found);
    }

    // a single missed block loses that user
    let mut lists = or_mac_combine(&blocks, 32);
    lists.0[10].remove(&blocks[0][10]);
    let decoded = tree_decode(&lists, &codebook)?;
    println!("block 10 of user 0 erased: user 0 recovered = {}", decoded.contains(&payloads[0]));
    Ok(())
}
