//! Unsourced random access over a block-fading massive-MIMO channel.
//!
//! Every active user shares one `L × 2^J` complex codebook. A `B`-bit payload is
//! split by an outer tree code into `S` blocks of `J` bits, and block `s` is sent
//! as one codebook column in slot `s`. The receiver never estimates the channel:
//! per slot it fits the nonnegative activity vector `γ` to the sample covariance
//! `YYᴴ/M` (maximum likelihood or nonnegative least squares, both by coordinate
//! descent), thresholds it into a candidate list, and the tree decoder stitches
//! the per-slot lists back into payloads.
//!
//! Modules map onto the pipeline:
//!
//! - [`channel`]: codebook sampling, activity vector, received-signal synthesis.
//! - [`decoder`]: covariance-based activity detection and support decisions.
//! - [`tree`]: outer tree code, OR-MAC combining and the entropy bound.
//! - [`sim`]: Monte-Carlo trials, error metrics, sweeps and CSV output.
//!
//! See the `examples/` directory of this crate for one runnable program per
//! capability.

pub mod channel;
pub mod decoder;
mod error;
mod herm;
pub mod sim;
pub mod tree;

pub use error::{ChannelError, ConfigError, DecoderError, SimError, TreeError};
pub use num_complex::Complex64;

pub(crate) mod rng {
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    /// Counter-addressed substream: the same `(seed, stream)` pair always
    /// yields the same sequence, independently of any other stream.
    pub fn substream(seed: u64, stream: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        rng
    }
}
