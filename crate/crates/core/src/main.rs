fn main() -> std::process::ExitCode {
    nusample::cli::main()
}
