fn main() -> std::process::ExitCode {
    majorant_lab::cli::main()
}
