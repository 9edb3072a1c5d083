use std::process::ExitCode;

use complab_runner::config::TOL_ENV;
use complab_runner::execute;

fn main() -> ExitCode {
    let tol = std::env::var(TOL_ENV).ok();
    let code = execute(
        std::env::args_os(),
        tol.as_deref(),
        &mut std::io::stdout().lock(),
        &mut std::io::stderr().lock(),
    );
    ExitCode::from(code)
}
