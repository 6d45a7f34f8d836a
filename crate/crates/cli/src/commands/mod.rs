mod avalanches;
mod estimate;
mod replicate;
mod simulate;
mod theory;

use crate::args::Command;
use crate::error::CliError;

pub fn run(command: &Command) -> Result<(), CliError> {
    match command {
        Command::Simulate(a) => simulate::run(a),
        Command::Theory(a) => theory::run(a),
        Command::Avalanches(a) => avalanches::run(a),
        Command::Replicate(a) => replicate::run(a),
        Command::Estimate(a) => estimate::run(a),
    }
}
