fn main() -> std::process::ExitCode {
    kgforge::cli::run()
}
