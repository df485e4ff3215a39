from meanform.cli import main

main()
