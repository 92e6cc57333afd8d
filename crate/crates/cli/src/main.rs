use std::io::Write;

fn main() {
    let out = periodkit_cli::run(std::env::args_os());
    match (&out.output, &out.report) {
        (Some(path), Some(_)) => {
            if let Err(e) = std::fs::write(path, &out.text) {
                eprintln!("cannot write {}: {}", path.display(), e);
                std::process::exit(periodkit_cli::EXIT_USAGE);
            }
        }
        (_, None) if out.code != 0 => eprint!("{}", out.text),
        _ => {
            let mut stdout = std::io::stdout().lock();
            let _ = stdout.write_all(out.text.as_bytes());
            let _ = stdout.flush();
        }
    }
    std::process::exit(out.code);
}
