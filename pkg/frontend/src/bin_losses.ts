#!/usr/bin/env node
import { mainLosses } from "./cli.js";

process.exit(mainLosses(process.argv.slice(2)));
