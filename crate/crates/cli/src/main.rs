fn main() {
    let response = tgamma_cli::run_from(std::env::args_os());
    for line in &response.stderr {
        eprintln!("{line}");
    }
    print!("{}", response.stdout);
    if !response.stdout.ends_with('\n') {
        println!();
    }
    std::process::exit(response.code);
}
