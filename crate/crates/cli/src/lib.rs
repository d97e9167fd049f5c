//! Command line front end for `saddleloop`: system files, run configuration,
//! CSV/JSON/SVG output and the exit-code convention (0 ok, 2 validation,
//! 3 numeric, 4 regime).

pub mod commands;
pub mod config;
pub mod input;
pub mod plot;
pub mod report;

use clap::Parser;
use serde_json::Value;

pub use config::{Args, Command, RunConfig};
pub use report::CliError;

/// Parses `argv`, runs, and returns the exit code and the JSON to print.
/// Help and version requests return `None` for the JSON and print through clap.
pub fn main_with_args<I, T>(argv: I) -> (i32, Option<Value>)
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let args = match Args::try_parse_from(argv) {
        Ok(a) => a,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return (0, None);
            }
            let err = CliError::validation(
                "cli",
                "parse_args",
                e.render().to_string().trim().to_string(),
            );
            return (err.exit_code(), Some(err.to_json()));
        }
    };
    let out_dir = args.out.clone();
    let res = RunConfig::from_args(args).and_then(|cfg| commands::run(&cfg).map(|v| (cfg, v)));
    match res {
        Ok((_, v)) => (0, Some(v)),
        Err(e) => {
            let j = e.to_json();
            if let Some(dir) = out_dir {
                if let Ok(out) = report::OutDir::create(&dir) {
                    let _ = out.write_json("error.json", &j);
                }
            }
            (e.exit_code(), Some(j))
        }
    }
}
