use std::path::PathBuf;

use clap::Args;
use corsing_core::analysis::paper_constants;
use serde::Serialize;

use crate::report::{report, write_json, Failure};

#[derive(Args, Serialize)]
pub struct ConstantsArgs {
    /// Output file (default stdout).
    #[arg(long)]
    out: Option<PathBuf>,
}

pub fn run(args: ConstantsArgs) -> Result<(), Failure> {
    write_json(args.out.as_deref(), &report("constants", &args, paper_constants()))
}
