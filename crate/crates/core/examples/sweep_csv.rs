//! Drives the `sweep` command in-process and prints its CSV: the numeric QFI
//! against the matching closed form over a gain grid.
//!
//! Run with `cargo run --release --example sweep_csv`.

fn main() {
    let args = [
        "su11", "sweep", "--a", "coherent:1", "--model", "s", "--param", "g", "--start", "0.1", "--stop",
        "1.0", "--count", "10", "--columns", "qfi,f_gong",
    ];
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = su11::cli::run(args, &mut out, &mut err);
    print!("{}", String::from_utf8_lossy(&out));
    eprint!("{}", String::from_utf8_lossy(&err));
    std::process::exit(code);
}
