package main

import "fmt"

func greetingParts() []string {
	return []string{"Hel", "lo, ", "wor", "ld!"}
}

func buildGreeting() string {
	out := ""
	for _, part := range greetingParts() {
		out += part
	}
	return out
}

func main() {
	fmt.Println(buildGreeting())
}
