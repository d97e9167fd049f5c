use std::process::ExitCode;

fn main() -> ExitCode {
    let (code, json) = saddleloop_cli::main_with_args(std::env::args_os());
    if let Some(v) = json {
        let text = serde_json::to_string_pretty(&v).expect("json values always serialize");
        if code == 0 {
            println!("{text}");
        } else {
            eprintln!("{text}");
        }
    }
    ExitCode::from(code as u8)
}
