//! Times monolithic, pods and full cuts of shortest-path fattrees and prints
//! the CSV table.

use srpcut::bench::{bench_fattree, write_csv, Suite};
use srpcut::checker::CheckOptions;
use srpcut::netgen::CutKind;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let cuts = [CutKind::Monolithic, CutKind::Pods, CutKind::Full];
    let rows = bench_fattree(Suite::FattreeSp, &[4, 6], &cuts, 1, &CheckOptions::default())?;
    write_csv(&rows, std::io::stdout())?;
    Ok(())
}
