fn main() {
    let code = dac_dist::cli::run(std::env::args_os(), &mut std::io::stdout().lock());
    std::process::exit(code);
}
