fn main() {
    std::process::exit(dwork_zeta::cli::main_with_args(std::env::args_os()));
}
