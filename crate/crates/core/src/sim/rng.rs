use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub(crate) const DOMAIN_NOISE: u64 = 0x006e_6f69_7365;
pub(crate) const DOMAIN_AGC: u64 = 0x0061_6763;
pub(crate) const DOMAIN_SCENE: u64 = 0x0073_6365_6e65;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Independent generator for `(seed, domain, index)`; each frame index gets
/// its own ChaCha stream so frames can be generated in any order.
pub(crate) fn child_rng(seed: u64, domain: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(splitmix64(seed ^ splitmix64(domain)));
    rng.set_stream(index);
    rng
}
