//! Print the genus-0/genus-1 table of `M_N^k` up to a degree.
//!
//! ```text
//! cargo run --release --example tables -- 5 3 3
//! ```

use std::time::Instant;

use vsc_core::params::HypersurfaceParams;
use vsc_core::pipeline::{genus1_gw, records_to_tsv};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<u32> = std::env::args().skip(1).map(|s| s.parse()).collect::<Result<_, _>>()?;
    let [n, k, dmax] = args[..] else {
        return Err("usage: tables N k dmax".into());
    };
    let params = HypersurfaceParams::new(n, k)?;
    let t = Instant::now();
    let tables = genus1_gw(&params, dmax, None)?;
    print!("{}", records_to_tsv(&params, &tables.records)?);
    eprintln!("{:?}", t.elapsed());
    Ok(())
}
