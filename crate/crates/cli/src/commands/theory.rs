use crate::args::TheoryArgs;
use crate::error::CliError;
use crate::output::{ensure_dir, say, write_json};
use crate::source::{check_pc, resolve_model};
use soc_auction::analytics::theory_summary;

pub fn run(args: &TheoryArgs) -> Result<(), CliError> {
    check_pc(args.pc)?;
    if !(args.b.is_finite() && args.b >= 0.0) {
        return Err(CliError::config(format!(
            "--b: must be non-negative, got {}",
            args.b
        )));
    }
    let model = resolve_model(&args.model)?;
    let summary = theory_summary(&model, args.pc, args.b)
        .map_err(|e| CliError::config(format!("--model: {e}")))?;
    let body = serde_json::to_string_pretty(&summary).expect("summary serializes");
    say(&body)?;
    if let Some(dir) = &args.out {
        ensure_dir(dir)?;
        write_json(dir, "theory.json", &summary)?;
    }
    Ok(())
}
