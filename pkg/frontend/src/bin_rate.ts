#!/usr/bin/env node
import { mainRate } from "./cli.js";

process.exit(mainRate(process.argv.slice(2)));
