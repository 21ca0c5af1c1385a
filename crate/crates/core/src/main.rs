fn main() {
    let code = qevo_sat::cli::main_with_args(std::env::args_os());
    std::process::exit(code);
}
