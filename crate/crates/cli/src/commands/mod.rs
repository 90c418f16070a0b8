mod compare;
mod discrete;
mod fit;
mod losers;
mod master;
mod regvar;

use crate::cli::Command;
use crate::error::CliResult;

pub fn dispatch(command: Command) -> CliResult<()> {
    match command {
        Command::SimulateDiscrete(a) => discrete::run(a),
        Command::SimulateLosers(a) => losers::run(a),
        Command::SolveMaster(a) => master::run(a),
        Command::Fit(a) => fit::run(a),
        Command::Regvar(a) => regvar::run(a),
        Command::CompareTails(a) => compare::run(a),
    }
}
