from fracwave.cli import main

main()
