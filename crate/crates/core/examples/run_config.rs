//! Runs an experiment config in-process, as the `bertini` binary does.

use bertini_lab::cli::{run, Overrides};

fn main() {
    let path = std::env::args().nth(1).unwrap_or_else(|| "configs/avoidance.json".into());
    let out = run(
        path.as_ref(),
        &Overrides {
            out: Some(std::env::temp_dir().join("bertini-example")),
            ..Default::default()
        },
    );
    print!("{}", out.message);
    for p in out.written {
        println!("wrote {}", p.display());
    }
    std::process::exit(out.exit_code);
}
