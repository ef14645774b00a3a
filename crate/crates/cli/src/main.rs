fn main() {
    std::process::exit(tf_hpm_cli::run(std::env::args_os()));
}
