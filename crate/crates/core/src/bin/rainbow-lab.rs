fn main() -> std::process::ExitCode {
    rainbow_lab::cli::main()
}
